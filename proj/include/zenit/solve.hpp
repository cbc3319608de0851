#pragma once

#include <filesystem>
#include <map>
#include <string>

#include "zenit/model.hpp"

namespace zenit {

enum class SolveStatus { optimal, infeasible, unbounded, limit };
std::string to_string(SolveStatus status);

struct SolveResult {
    SolveStatus status = SolveStatus::infeasible;
    double objective_value = 0.0; // excludes the model's reported constant
    std::map<std::string, double> variable_values;
    std::map<std::string, double> duals; // constraint name -> dual, LP only
    double solve_time = 0.0;             // seconds

    double value(const std::string& name) const;
};

/// Writes a CPLEX-LP-format file: deterministic ordering, 12 significant
/// digits, no locale formatting. Throws on an empty model.
void export_lp(const ModelInstance& model, const std::filesystem::path& path);

/// Reader for the LP subset export_lp emits (objective, constraints, bounds,
/// binaries). Lives here so tests can check export/import idempotence.
ModelInstance read_lp(const std::filesystem::path& path);

/// Solution-file dialects. `highs` covers both the HiGHS binary's raw solution
/// style and the bundled scipy backend, which emits the same layout.
enum class SolutionDialect { highs };

SolveResult parse_solution_file(const std::filesystem::path& path, SolutionDialect dialect);

struct BackendConfig {
    std::string name = "scipy";    // scipy | highs
    std::string command;           // override: "<cmd> <lp> <sol>" is invoked
    double time_limit_s = 0.0;     // 0 = none
    std::filesystem::path work_dir; // empty = fresh temp dir

    /// Resolves name/command from ZENIT_BACKEND / ZENIT_BACKEND_CMD env vars.
    static BackendConfig from_environment();
};

/// Exports the model, runs the backend subprocess, parses and cross-checks the
/// solution (names known, values within bounds).
SolveResult solve(const ModelInstance& model, const BackendConfig& config = BackendConfig::from_environment());

/// Solution values in the model's variable order (status must be optimal).
std::vector<double> value_vector(const ModelInstance& model, const SolveResult& result);

} // namespace zenit
