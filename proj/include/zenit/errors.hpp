#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace zenit {

/// Base class for all library errors; `code()` is a stable machine-readable tag.
class ZenError : public std::runtime_error {
public:
    ZenError(std::string code, const std::string& message)
        : std::runtime_error(code + ": " + message), code_(std::move(code)) {}

    const std::string& code() const { return code_; }

private:
    std::string code_;
};

struct ValidationIssue {
    std::string code;   // MissingSeries, BadUnit, NegativeCost, HorizonMismatch, ...
    std::string detail; // offending id / value
};

/// Carries every violation found, not just the first.
class ValidationError : public ZenError {
public:
    explicit ValidationError(std::vector<ValidationIssue> issues)
        : ZenError("ValidationError", join(issues)), issues_(std::move(issues)) {}

    const std::vector<ValidationIssue>& issues() const { return issues_; }

    bool has(const std::string& code) const {
        for (const auto& issue : issues_)
            if (issue.code == code) return true;
        return false;
    }

private:
    static std::string join(const std::vector<ValidationIssue>& issues) {
        std::string out;
        for (const auto& issue : issues) {
            if (!out.empty()) out += "; ";
            out += issue.code + "(" + issue.detail + ")";
        }
        return out;
    }

    std::vector<ValidationIssue> issues_;
};

} // namespace zenit
