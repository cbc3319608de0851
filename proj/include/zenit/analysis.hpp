#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "zenit/domain.hpp"
#include "zenit/model.hpp"
#include "zenit/solve.hpp"
#include "zenit/tariffs.hpp"

namespace zenit {

struct SolutionReport {
    std::string scheme;
    std::string scenario_fingerprint;
    std::optional<double> export_limit;

    std::map<std::string, double> capacities; // tech instance id -> kW / kWh
    std::vector<double> imports;              // metered total import per hour
    std::vector<double> exports;              // metered total export per hour
    std::vector<double> net_imports;          // import - export per hour
    std::vector<double> duration;             // net imports, non-increasing

    std::map<std::string, double> cost_breakdown; // per CostComponent name
    double objective_value = 0.0;
    double reported_constant = 0.0;
    double dso_revenue_lifetime = 0.0;
    std::optional<double> subscribed_capacity;
    double peak_import = 0.0;
};

/// Non-increasing sort, stable for equal values.
std::vector<double> duration_curve(const std::vector<double>& net_imports);

double peak_import(const std::vector<double>& imports);

/// Lifetime-discounted DSO income: annual ex-post tariff cost (fixed charges
/// included, dynamic export bonus subtracted) times the lifetime factor.
double dso_revenue(const TariffScheme& scheme, const std::vector<double>& imports,
                   const std::vector<double>& exports, const ScarcityFlags& flags,
                   double subscribed, const EconomicParams& economic);

SolutionReport make_report(const ModelInstance& model, const SolveResult& result,
                           const ValidatedSpec& spec, const TariffScheme& scheme,
                           const ScarcityFlags& flags, std::optional<double> export_limit,
                           const std::string& fingerprint);

struct InvestmentDeltaRow {
    std::string tech;
    double baseline = 0.0;
    std::vector<double> variants; // per report, same order as input
};

struct InvestmentDeltaTable {
    std::string baseline_scheme;
    std::vector<std::string> variant_schemes;
    std::vector<InvestmentDeltaRow> rows;
};

/// Side-by-side capacities against the Energy-scheme baseline. Throws
/// MismatchedScenarios when reports come from different scenarios.
InvestmentDeltaTable investment_delta_table(const std::vector<SolutionReport>& reports,
                                            const SolutionReport& baseline);

/// capacities.csv, hourly_flows.csv, duration_curve.csv, summary.csv
void write_report_csvs(const SolutionReport& report, const std::filesystem::path& dir);

} // namespace zenit
