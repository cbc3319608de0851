#include "zenit/solve.hpp"

#include <cctype>
#include <cerrno>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <random>
#include <sstream>

#include "zenit/backend_script.hpp"

namespace zenit {

namespace fs = std::filesystem;

std::string to_string(SolveStatus status) {
    switch (status) {
    case SolveStatus::optimal: return "optimal";
    case SolveStatus::infeasible: return "infeasible";
    case SolveStatus::unbounded: return "unbounded";
    case SolveStatus::limit: return "limit";
    }
    return "?";
}

double SolveResult::value(const std::string& name) const {
    auto it = variable_values.find(name);
    if (it == variable_values.end()) throw ZenError("MissingVariable", name);
    return it->second;
}

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void fmt_num(std::string& out, double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    out += buf;
}

class ExpressionWriter {
public:
    explicit ExpressionWriter(std::string& out) : out_(out) {}

    void term(double coeff, const std::string& name) {
        if (first_) {
            if (coeff < 0.0) out_ += "- ";
            first_ = false;
        } else {
            out_ += coeff < 0.0 ? " - " : " + ";
            if (++on_line_ % 8 == 0) out_ += "\n   ";
        }
        fmt_num(out_, std::abs(coeff));
        out_ += ' ';
        out_ += name;
    }

    bool empty() const { return first_; }

private:
    std::string& out_;
    bool first_ = true;
    int on_line_ = 0;
};

} // namespace

void export_lp(const ModelInstance& model, const fs::path& path) {
    if (model.variables.empty()) throw ZenError("EmptyModel", "model has no variables");

    std::string out;
    out.reserve(model.variables.size() * 64 + model.rows.size() * 96);

    out += "\\ zenit model\nMinimize\n obj: ";
    {
        ExpressionWriter expr(out);
        for (std::size_t i = 0; i < model.variables.size(); ++i)
            if (model.objective[i] != 0.0) expr.term(model.objective[i], model.variables[i].name);
    }
    out += "\nSubject To\n";
    for (const auto& row : model.rows) {
        out += ' ';
        out += row.name;
        out += ": ";
        ExpressionWriter expr(out);
        for (const auto& [idx, coeff] : row.terms) expr.term(coeff, model.variables[idx].name);
        if (expr.empty()) out += "0 " + model.variables[0].name;
        switch (row.sense) {
        case RowSense::le: out += " <= "; break;
        case RowSense::ge: out += " >= "; break;
        case RowSense::eq: out += " = "; break;
        }
        fmt_num(out, row.rhs);
        out += '\n';
    }

    // Every non-binary variable appears here, in index order, so a reader can
    // reconstruct the exact variable ordering.
    out += "Bounds\n";
    bool any_binary = false;
    for (const auto& v : model.variables) {
        if (v.kind == VarKind::binary) {
            any_binary = true;
            continue;
        }
        out += ' ';
        if (v.lb == -kInf && v.ub == kInf) {
            out += v.name + " free";
        } else if (v.lb == v.ub) {
            out += v.name + " = ";
            fmt_num(out, v.lb);
        } else if (v.ub == kInf) {
            out += v.name + " >= ";
            fmt_num(out, v.lb);
        } else {
            if (v.lb == -kInf) out += "-inf";
            else fmt_num(out, v.lb);
            out += " <= " + v.name + " <= ";
            fmt_num(out, v.ub);
        }
        out += '\n';
    }
    if (any_binary) {
        out += "Binaries\n";
        for (const auto& v : model.variables)
            if (v.kind == VarKind::binary) out += ' ' + v.name + '\n';
    }
    out += "End\n";

    std::ofstream file(path, std::ios::binary);
    if (!file) throw ZenError("IoError", "cannot write " + path.string());
    file.write(out.data(), static_cast<std::streamsize>(out.size()));
    if (!file) throw ZenError("IoError", "short write to " + path.string());
}

// ---------------------------------------------------------------------------
// LP reader (subset matching export_lp)
// ---------------------------------------------------------------------------

namespace {

struct Token {
    int line;
    std::string text;
};

struct LpSections {
    std::vector<Token> objective, constraints, bounds, binaries;
};

bool is_number(const std::string& tok, double* out) {
    if (tok == "inf" || tok == "+inf") { *out = kInf; return true; }
    if (tok == "-inf") { *out = -kInf; return true; }
    errno = 0;
    char* end = nullptr;
    double v = std::strtod(tok.c_str(), &end);
    if (end != tok.c_str() + tok.size() || errno == ERANGE) return false;
    *out = v;
    return true;
}

LpSections lex_lp(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw ZenError("IoError", "cannot open " + path.string());

    LpSections sections;
    std::vector<Token>* current = nullptr;
    std::string line;
    int lineno = 0;
    bool done = false;
    while (!done && std::getline(in, line)) {
        ++lineno;
        if (auto pos = line.find('\\'); pos != std::string::npos) line.erase(pos);
        std::istringstream words(line);
        std::string tok;
        bool at_line_start = true;
        while (words >> tok) {
            std::string low;
            for (char c : tok) low += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
            if (at_line_start) {
                if (low == "minimize" || low == "min" || low == "minimise") { current = &sections.objective; at_line_start = false; continue; }
                if (low == "subject") { current = &sections.constraints; std::string to; words >> to; at_line_start = false; continue; }
                if (low == "st" || low == "s.t.") { current = &sections.constraints; at_line_start = false; continue; }
                if (low == "bounds" || low == "bound") { current = &sections.bounds; at_line_start = false; continue; }
                if (low == "binaries" || low == "binary" || low == "bin") { current = &sections.binaries; at_line_start = false; continue; }
                if (low == "end") { done = true; break; }
                if (low == "maximize" || low == "max" || low == "maximise")
                    throw ZenError("ParseError", "line " + std::to_string(lineno) + ": maximize not supported");
            }
            at_line_start = false;
            if (!current)
                throw ZenError("ParseError", "line " + std::to_string(lineno) + ": token before first section");
            current->push_back({lineno, tok});
        }
    }
    return sections;
}

class LpReader {
public:
    ModelInstance run(const fs::path& path) {
        auto sections = lex_lp(path);

        // Bounds list every variable in index order; register them first.
        register_bound_vars(sections.bounds);
        for (const auto& tok : sections.binaries) var(tok.text, VarKind::binary);

        parse_objective(sections.objective);
        parse_constraints(sections.constraints);
        apply_bounds(sections.bounds);

        if (model_.variables.empty()) throw ZenError("EmptyModel", path.string());
        model_.horizon = 0;
        return std::move(model_);
    }

private:
    ModelInstance model_;

    int var(const std::string& name, VarKind kind = VarKind::continuous) {
        auto it = model_.variable_index.find(name);
        if (it != model_.variable_index.end()) return it->second;
        const int idx = static_cast<int>(model_.variables.size());
        model_.variables.push_back({name, 0.0, kind == VarKind::binary ? 1.0 : kInf, kind});
        model_.objective.push_back(0.0);
        model_.variable_index.emplace(name, idx);
        return idx;
    }

    void register_bound_vars(const std::vector<Token>& tokens) {
        // a bound line is "name free", "name = v", "name >= v" or "lo <= name <= hi"
        std::size_t i = 0;
        while (i < tokens.size()) {
            const std::size_t start = i;
            const int line = tokens[i].line;
            while (i < tokens.size() && tokens[i].line == line) ++i;
            const std::size_t n = i - start;
            if (n == 2 || n == 3)
                var(tokens[start].text); // "name free" / "name <op> value"
            else if (n == 5)
                var(tokens[start + 2].text); // "lo <= name <= hi"
            else
                throw ZenError("ParseError", "line " + std::to_string(line) + ": bad bound");
        }
    }

    struct Expr {
        std::vector<std::pair<int, double>> terms;
        std::size_t next = 0;
        std::string sense;
    };

    Expr parse_expr(const std::vector<Token>& tokens, std::size_t pos, bool stop_at_sense) {
        Expr expr;
        double sign = 1.0;
        bool has_pending = false;
        double pending = 0.0;
        while (pos < tokens.size()) {
            const auto& tok = tokens[pos];
            if (stop_at_sense && (tok.text == "<=" || tok.text == ">=" || tok.text == "=" ||
                                  tok.text == "<" || tok.text == ">")) {
                expr.sense = tok.text;
                expr.next = pos + 1;
                return expr;
            }
            if (tok.text.back() == ':' ||
                (pos + 1 < tokens.size() && tokens[pos + 1].text == ":")) {
                expr.next = pos;
                return expr;
            }
            if (tok.text == "+") {
                // keep sign
            } else if (tok.text == "-") {
                sign = -sign;
            } else {
                double num;
                if (is_number(tok.text, &num)) {
                    if (has_pending)
                        throw ZenError("ParseError", "line " + std::to_string(tok.line) + ": two numbers in a row");
                    pending = num;
                    has_pending = true;
                } else {
                    expr.terms.push_back({var(tok.text), sign * (has_pending ? pending : 1.0)});
                    sign = 1.0;
                    has_pending = false;
                }
            }
            ++pos;
        }
        expr.next = pos;
        return expr;
    }

    void parse_objective(const std::vector<Token>& tokens) {
        std::size_t pos = 0;
        if (pos < tokens.size() && tokens[pos].text.back() == ':') ++pos;
        auto expr = parse_expr(tokens, pos, false);
        for (const auto& [idx, coeff] : expr.terms) model_.objective[idx] += coeff;
    }

    void parse_constraints(const std::vector<Token>& tokens) {
        std::size_t pos = 0;
        int rowno = 0;
        while (pos < tokens.size()) {
            std::string name;
            if (tokens[pos].text.back() == ':') {
                name = tokens[pos].text.substr(0, tokens[pos].text.size() - 1);
                ++pos;
            } else if (pos + 1 < tokens.size() && tokens[pos + 1].text == ":") {
                name = tokens[pos].text;
                pos += 2;
            } else {
                name = "r" + std::to_string(rowno);
            }
            const int line = pos < tokens.size() ? tokens[pos].line : 0;
            auto expr = parse_expr(tokens, pos, true);
            if (expr.sense.empty())
                throw ZenError("ParseError", "line " + std::to_string(line) + ": constraint '" + name + "' has no sense");
            pos = expr.next;
            double rhs_sign = 1.0;
            if (pos < tokens.size() && (tokens[pos].text == "+" || tokens[pos].text == "-")) {
                if (tokens[pos].text == "-") rhs_sign = -1.0;
                ++pos;
            }
            double rhs;
            if (pos >= tokens.size() || !is_number(tokens[pos].text, &rhs))
                throw ZenError("ParseError", "line " + std::to_string(line) + ": constraint '" + name + "' missing rhs");
            ++pos;
            RowSense sense = RowSense::eq;
            if (expr.sense == "<=" || expr.sense == "<") sense = RowSense::le;
            else if (expr.sense == ">=" || expr.sense == ">") sense = RowSense::ge;
            model_.rows.push_back({name, std::move(expr.terms), sense, rhs_sign * rhs});
            ++rowno;
        }
    }

    void apply_bounds(const std::vector<Token>& tokens) {
        std::size_t i = 0;
        while (i < tokens.size()) {
            const std::size_t start = i;
            const int line = tokens[i].line;
            while (i < tokens.size() && tokens[i].line == line) ++i;
            const std::size_t n = i - start;
            auto text = [&](std::size_t k) { return tokens[start + k].text; };
            if (n == 2 && text(1) == "free") {
                auto& v = model_.variables[var(text(0))];
                v.lb = -kInf;
                v.ub = kInf;
            } else if (n == 3) {
                double num;
                if (is_number(text(0), &num)) { // should not happen with 3 tokens
                    throw ZenError("ParseError", "line " + std::to_string(line) + ": bad bound");
                }
                if (!is_number(text(2), &num))
                    throw ZenError("ParseError", "line " + std::to_string(line) + ": bad bound value");
                auto& v = model_.variables[var(text(0))];
                if (text(1) == "<=" || text(1) == "<") v.ub = num;
                else if (text(1) == ">=" || text(1) == ">") v.lb = num;
                else if (text(1) == "=") v.lb = v.ub = num;
                else throw ZenError("ParseError", "line " + std::to_string(line) + ": bad bound operator");
            } else if (n == 5) {
                double lo, hi;
                if (!is_number(text(0), &lo) || !is_number(text(4), &hi))
                    throw ZenError("ParseError", "line " + std::to_string(line) + ": bad range bound");
                auto& v = model_.variables[var(text(2))];
                v.lb = lo;
                v.ub = hi;
            } else {
                throw ZenError("ParseError", "line " + std::to_string(line) + ": unrecognized bound");
            }
        }
    }
};

} // namespace

ModelInstance read_lp(const fs::path& path) { return LpReader{}.run(path); }

// ---------------------------------------------------------------------------
// Solution files (HiGHS raw dialect)
// ---------------------------------------------------------------------------

namespace {

double parse_value(const std::string& text, int lineno) {
    errno = 0;
    char* end = nullptr;
    const double v = std::strtod(text.c_str(), &end);
    if (end == text.c_str() || *end != '\0')
        throw ZenError("ParseError", "line " + std::to_string(lineno) + ": bad number '" + text + "'");
    if (errno == ERANGE)
        throw ZenError("ParseError", "line " + std::to_string(lineno) + ": overflow in '" + text + "'");
    return v;
}

} // namespace

SolveResult parse_solution_file(const fs::path& path, SolutionDialect dialect) {
    (void)dialect; // single dialect today
    std::ifstream in(path);
    if (!in) throw ZenError("IoError", "cannot open " + path.string());

    std::vector<std::string> lines;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        lines.push_back(line);
    }

    auto fail_eof = [&]() -> ZenError {
        return ZenError("ParseError", "line " + std::to_string(lines.size()) + ": unexpected end of file");
    };

    std::size_t i = 0;
    auto next_content = [&]() -> std::string {
        while (i < lines.size() && lines[i].empty()) ++i;
        if (i >= lines.size()) throw fail_eof();
        return lines[i++];
    };

    std::string header = next_content();
    SolveResult result;
    std::string status_text;
    if (header.rfind("Model status", 0) != 0)
        throw ZenError("ParseError", "line " + std::to_string(i) + ": expected 'Model status'");
    if (auto pos = header.find(':'); pos != std::string::npos) {
        status_text = header.substr(pos + 1);
        while (!status_text.empty() && status_text.front() == ' ') status_text.erase(0, 1);
    } else {
        status_text = next_content();
    }

    if (status_text == "Optimal") result.status = SolveStatus::optimal;
    else if (status_text == "Infeasible") result.status = SolveStatus::infeasible;
    else if (status_text == "Unbounded") result.status = SolveStatus::unbounded;
    else if (status_text.rfind("Time limit", 0) == 0 || status_text == "Limit")
        result.status = SolveStatus::limit;
    else throw ZenError("ParseError", "line " + std::to_string(i) + ": unknown status '" + status_text + "'");

    if (result.status != SolveStatus::optimal) return result;

    if (next_content() != "# Primal solution values")
        throw ZenError("ParseError", "line " + std::to_string(i) + ": expected '# Primal solution values'");
    if (next_content() != "Feasible")
        throw ZenError("ParseError", "line " + std::to_string(i) + ": expected 'Feasible'");

    auto read_pair = [&](const std::string& text, int lineno) {
        auto sp = text.rfind(' ');
        if (sp == std::string::npos)
            throw ZenError("ParseError", "line " + std::to_string(lineno) + ": expected 'name value'");
        return std::pair<std::string, double>{text.substr(0, sp), parse_value(text.substr(sp + 1), lineno)};
    };

    const std::string obj_line = next_content();
    if (obj_line.rfind("Objective", 0) != 0)
        throw ZenError("ParseError", "line " + std::to_string(i) + ": expected 'Objective'");
    result.objective_value = parse_value(obj_line.substr(obj_line.rfind(' ') + 1), static_cast<int>(i));

    auto read_counted = [&](const std::string& kind, std::map<std::string, double>* into) {
        const std::string head = next_content();
        if (head.rfind("# " + kind, 0) != 0)
            throw ZenError("ParseError", "line " + std::to_string(i) + ": expected '# " + kind + " <n>'");
        const long n = std::strtol(head.substr(kind.size() + 2).c_str(), nullptr, 10);
        for (long k = 0; k < n; ++k) {
            auto [name, value] = read_pair(next_content(), static_cast<int>(i));
            if (into) (*into)[name] = value;
        }
    };

    read_counted("Columns", &result.variable_values);
    read_counted("Rows", nullptr); // row activities

    // Optional dual section.
    while (i < lines.size() && lines[i].empty()) ++i;
    if (i < lines.size() && lines[i] == "# Dual solution values") {
        ++i;
        const std::string dual_state = next_content();
        if (dual_state == "Feasible") {
            read_counted("Columns", nullptr);
            read_counted("Rows", &result.duals);
        }
    }
    return result;
}

// ---------------------------------------------------------------------------
// Backend invocation
// ---------------------------------------------------------------------------

BackendConfig BackendConfig::from_environment() {
    BackendConfig config;
    if (const char* name = std::getenv("ZENIT_BACKEND")) config.name = name;
    if (const char* cmd = std::getenv("ZENIT_BACKEND_CMD")) config.command = cmd;
    if (const char* limit = std::getenv("ZENIT_TIME_LIMIT")) config.time_limit_s = std::atof(limit);
    return config;
}

namespace {

fs::path make_work_dir(const BackendConfig& config) {
    if (!config.work_dir.empty()) {
        fs::create_directories(config.work_dir);
        return config.work_dir;
    }
    static std::mt19937_64 rng{std::random_device{}()};
    std::ostringstream name;
    name << "zenit-" << std::hex << rng();
    fs::path dir = fs::temp_directory_path() / name.str();
    fs::create_directories(dir);
    return dir;
}

std::string quoted(const fs::path& p) { return "'" + p.string() + "'"; }

} // namespace

SolveResult solve(const ModelInstance& model, const BackendConfig& config) {
    const fs::path dir = make_work_dir(config);
    const fs::path lp = dir / "model.lp";
    const fs::path sol = dir / "model.sol";
    const fs::path log = dir / "solver.log";
    export_lp(model, lp);
    std::error_code ec;
    fs::remove(sol, ec);

    std::string command;
    if (!config.command.empty()) {
        command = config.command + " " + quoted(lp) + " " + quoted(sol);
    } else if (config.name == "highs") {
        command = "highs --solution_file " + quoted(sol);
        if (config.time_limit_s > 0.0) command += " --time_limit " + std::to_string(config.time_limit_s);
        command += " " + quoted(lp);
    } else if (config.name == "scipy") {
        const fs::path script = dir / "backend.py";
        {
            std::ofstream out(script);
            out << kScipyBackendScript;
        }
        command = "python3 " + quoted(script) + " " + quoted(lp) + " " + quoted(sol);
        if (config.time_limit_s > 0.0) command += " --time-limit " + std::to_string(config.time_limit_s);
    } else {
        throw ZenError("BackendUnavailable", "unknown backend '" + config.name + "'");
    }
    command += " > " + quoted(log) + " 2>&1";

    const auto start = std::chrono::steady_clock::now();
    const int rc = std::system(command.c_str());
    const auto elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - start);

    if (!fs::exists(sol)) {
        std::string detail = "backend exit code " + std::to_string(rc);
        std::ifstream log_in(log);
        std::string tail, l;
        while (std::getline(log_in, l)) tail = l;
        if (!tail.empty()) detail += "; last log line: " + tail;
        throw ZenError("BackendUnavailable", detail);
    }

    SolveResult result = parse_solution_file(sol, SolutionDialect::highs);
    result.solve_time = elapsed.count();

    if (result.status == SolveStatus::optimal) {
        for (const auto& [name, value] : result.variable_values) {
            auto it = model.variable_index.find(name);
            if (it == model.variable_index.end())
                throw ZenError("ParseError", "solution names unknown variable '" + name + "'");
            const auto& v = model.variables[it->second];
            if (value < v.lb - 1e-6 || value > v.ub + 1e-6)
                throw ZenError("ParseError", "solution value for '" + name + "' violates its bounds");
        }
        if (result.variable_values.size() != model.variables.size())
            throw ZenError("ParseError", "solution is missing variables (" +
                                             std::to_string(result.variable_values.size()) + " of " +
                                             std::to_string(model.variables.size()) + ")");
    }
    return result;
}

std::vector<double> value_vector(const ModelInstance& model, const SolveResult& result) {
    std::vector<double> values(model.variables.size(), 0.0);
    for (std::size_t idx = 0; idx < model.variables.size(); ++idx)
        values[idx] = result.value(model.variables[idx].name);
    return values;
}

} // namespace zenit
