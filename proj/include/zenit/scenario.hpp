#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "zenit/analysis.hpp"
#include "zenit/domain.hpp"
#include "zenit/model.hpp"
#include "zenit/solve.hpp"
#include "zenit/tariffs.hpp"

namespace zenit {

/// One scenario document: neighborhood, series manifest, tariff, run options.
struct Scenario {
    NeighborhoodSpec neighborhood;
    std::filesystem::path series_csv;
    SeriesManifest series_manifest;
    TariffScheme tariff = EnergyTariff{};
    BuildOptions options;
    std::string fingerprint; // hash of the scenario content, for table matching
};

/// Parses the scenario JSON; schema errors carry JSON-pointer paths.
Scenario load_scenario(const std::filesystem::path& config_path);

struct CellOutcome {
    std::string scheme;
    std::optional<double> export_limit;
    SolveStatus status = SolveStatus::infeasible;
    std::string diagnostic; // e.g. the violated CO2 row name on infeasibility
    std::optional<SolutionReport> report;
    std::filesystem::path out_dir;
};

/// Builds, solves and reports one (scheme, export option) cell.
CellOutcome run_scenario(const Scenario& scenario, const BackendConfig& backend,
                         const std::filesystem::path& out_dir);

struct CompareOptions {
    std::vector<std::string> schemes; // empty = all four
    std::vector<std::optional<double>> export_limits; // empty = {none, 100}
    int jobs = 1;
};

struct CompareOutcome {
    std::vector<CellOutcome> cells;
    std::vector<std::string> failed_cells;
};

/// Runs the full scheme x export-limit grid and writes the combined
/// investment-delta, max-import and cost/revenue tables.
CompareOutcome compare_tariffs(const Scenario& scenario, const BackendConfig& backend,
                               const std::filesystem::path& out_dir,
                               const CompareOptions& options);

} // namespace zenit
