#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "zenit/scenario.hpp"

namespace {

// Exit codes: 0 optimal, 2 config/schema error, 3 infeasible, 4 backend
// failure, 5 unbounded/limit, 6 partial comparison failure.
constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitInfeasible = 3;
constexpr int kExitBackend = 4;
constexpr int kExitOther = 5;
constexpr int kExitPartial = 6;

std::optional<double> parse_export_limit(const std::string& text) {
    if (text.empty() || text == "none") return std::nullopt;
    return std::stod(text);
}

std::vector<std::string> split_list(const std::string& text) {
    std::vector<std::string> out;
    std::string item;
    for (char c : text) {
        if (c == ',') {
            if (!item.empty()) out.push_back(item);
            item.clear();
        } else {
            item += c;
        }
    }
    if (!item.empty()) out.push_back(item);
    return out;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"ZEN neighborhood investment/operation optimizer under grid tariff designs"};
    app.require_subcommand(1);

    std::string config_path;
    std::string scheme_override;
    std::string export_limit_text = "unset";
    std::string backend_name;
    std::string out_dir = "out";
    int jobs = 1;
    std::string schemes_filter;

    auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("--config", config_path, "scenario JSON document")->required();
        cmd->add_option("--backend", backend_name, "solver backend: scipy (default) or highs");
        cmd->add_option("--out", out_dir, "output directory");
    };

    CLI::App* run = app.add_subcommand("run", "build, solve and report one scenario cell");
    add_common(run);
    run->add_option("--scheme", scheme_override, "tariff override: energy|tou|subscribed|dynamic");
    run->add_option("--export-limit", export_limit_text, "kWh/h cap at the interconnection, or 'none'");

    CLI::App* compare = app.add_subcommand("compare", "run the scheme x export-limit grid");
    add_common(compare);
    compare->add_option("--schemes", schemes_filter, "comma-separated scheme filter");
    compare->add_option("--export-limit", export_limit_text,
                        "single export case instead of the {none,100} pair");
    compare->add_option("--jobs", jobs, "parallel cells")->check(CLI::PositiveNumber);

    CLI11_PARSE(app, argc, argv);

    zenit::BackendConfig backend = zenit::BackendConfig::from_environment();
    if (!backend_name.empty()) backend.name = backend_name;

    try {
        zenit::Scenario scenario = zenit::load_scenario(config_path);

        if (run->parsed()) {
            if (!scheme_override.empty()) {
                if (scheme_override == "energy") scenario.tariff = zenit::EnergyTariff{};
                else if (scheme_override == "tou") scenario.tariff = zenit::TimeOfUseTariff{};
                else if (scheme_override == "subscribed") scenario.tariff = zenit::SubscribedCapacityTariff{};
                else if (scheme_override == "dynamic") scenario.tariff = zenit::DynamicTariff{};
                else {
                    std::cerr << "unknown scheme '" << scheme_override << "'\n";
                    return kExitConfig;
                }
            }
            if (export_limit_text != "unset")
                scenario.options.export_limit = parse_export_limit(export_limit_text);

            const auto outcome = zenit::run_scenario(scenario, backend, out_dir);
            if (outcome.status == zenit::SolveStatus::optimal) {
                std::cout << "optimal; reports in " << outcome.out_dir.string() << "\n";
                return kExitOk;
            }
            std::cerr << outcome.diagnostic << "\n";
            return outcome.status == zenit::SolveStatus::infeasible ? kExitInfeasible : kExitOther;
        }

        zenit::CompareOptions options;
        options.jobs = jobs;
        if (!schemes_filter.empty()) options.schemes = split_list(schemes_filter);
        if (export_limit_text != "unset")
            options.export_limits = {parse_export_limit(export_limit_text)};

        const auto outcome = zenit::compare_tariffs(scenario, backend, out_dir, options);
        for (const auto& cell : outcome.cells)
            std::cout << cell.out_dir.filename().string() << ": "
                      << (cell.report ? "optimal" : cell.diagnostic) << "\n";
        if (!outcome.failed_cells.empty()) {
            std::cerr << outcome.failed_cells.size() << " cell(s) failed\n";
            return kExitPartial;
        }
        return kExitOk;
    } catch (const zenit::ZenError& e) {
        std::cerr << e.what() << "\n";
        if (e.code() == "ConfigError" || e.code() == "ValidationError") return kExitConfig;
        if (e.code() == "BackendUnavailable") return kExitBackend;
        return kExitOther;
    } catch (const std::exception& e) {
        std::cerr << e.what() << "\n";
        return kExitOther;
    }
}
