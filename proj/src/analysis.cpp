#include "zenit/analysis.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <numeric>

namespace zenit {

std::vector<double> duration_curve(const std::vector<double>& net_imports) {
    std::vector<std::size_t> order(net_imports.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return net_imports[a] > net_imports[b]; });
    std::vector<double> out;
    out.reserve(net_imports.size());
    for (std::size_t idx : order) out.push_back(net_imports[idx]);
    return out;
}

double peak_import(const std::vector<double>& imports) {
    double peak = 0.0;
    for (double v : imports) peak = std::max(peak, v);
    return peak;
}

double dso_revenue(const TariffScheme& scheme, const std::vector<double>& imports,
                   const std::vector<double>& exports, const ScarcityFlags& flags,
                   double subscribed, const EconomicParams& economic) {
    const double annual = tariff_cost_expost(scheme, imports, exports, flags, subscribed);
    return annual * discount_factor(economic.discount_rate, economic.lifetime_years);
}

SolutionReport make_report(const ModelInstance& model, const SolveResult& result,
                           const ValidatedSpec& spec, const TariffScheme& scheme,
                           const ScarcityFlags& flags, std::optional<double> export_limit,
                           const std::string& fingerprint) {
    SolutionReport report;
    report.scheme = scheme_tag(scheme);
    report.scenario_fingerprint = fingerprint;
    report.export_limit = export_limit;
    report.objective_value = result.objective_value;
    report.reported_constant = model.reported_constant;

    const auto values = value_vector(model, result);

    for (const auto& [tech, var] : model.capacity_vars) report.capacities[tech] = values[var];

    const int T = model.horizon;
    report.imports.reserve(T);
    report.exports.reserve(T);
    for (int t = 0; t < T; ++t) {
        report.imports.push_back(values[model.import_total_vars[t]]);
        report.exports.push_back(values[model.export_total_vars[t]]);
        report.net_imports.push_back(report.imports.back() - report.exports.back());
    }
    report.duration = duration_curve(report.net_imports);
    report.peak_import = peak_import(report.imports);

    if (model.subscribed_capacity_var >= 0)
        report.subscribed_capacity = values[model.subscribed_capacity_var];

    for (int c = 0; c < kCostComponentCount; ++c) {
        double total = 0.0;
        for (const auto& [idx, coeff] : model.component_terms[c]) total += coeff * values[idx];
        report.cost_breakdown[to_string(static_cast<CostComponent>(c))] = total;
    }
    // Decision-independent charges land in the component they belong to, so the
    // breakdown sums to objective + reported constant.
    report.cost_breakdown["investment"] +=
        spec->economic.heating_grid_enabled ? spec->economic.heating_grid_cost : 0.0;
    const double eps = discount_factor(spec->economic.discount_rate, spec->economic.lifetime_years);
    report.cost_breakdown["tariff"] += eps > 0.0 ? fixed_annual_charge(scheme) / eps : 0.0;

    report.dso_revenue_lifetime =
        dso_revenue(scheme, report.imports, report.exports, flags,
                    report.subscribed_capacity.value_or(0.0), spec->economic);
    return report;
}

InvestmentDeltaTable investment_delta_table(const std::vector<SolutionReport>& reports,
                                            const SolutionReport& baseline) {
    InvestmentDeltaTable table;
    table.baseline_scheme = baseline.scheme;
    std::vector<std::string> techs;
    for (const auto& [tech, cap] : baseline.capacities) techs.push_back(tech);
    for (const auto& report : reports) {
        if (report.scenario_fingerprint != baseline.scenario_fingerprint)
            throw ZenError("MismatchedScenarios",
                           report.scheme + " report comes from a different scenario than the baseline");
        table.variant_schemes.push_back(report.scheme);
        for (const auto& [tech, cap] : report.capacities)
            if (!baseline.capacities.count(tech)) techs.push_back(tech);
    }
    std::sort(techs.begin(), techs.end());
    techs.erase(std::unique(techs.begin(), techs.end()), techs.end());

    for (const auto& tech : techs) {
        InvestmentDeltaRow row;
        row.tech = tech;
        auto base_it = baseline.capacities.find(tech);
        row.baseline = base_it == baseline.capacities.end() ? 0.0 : base_it->second;
        for (const auto& report : reports) {
            auto it = report.capacities.find(tech);
            row.variants.push_back(it == report.capacities.end() ? 0.0 : it->second);
        }
        table.rows.push_back(std::move(row));
    }
    return table;
}

namespace {

std::string num(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

std::ofstream open_csv(const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ZenError("IoError", "cannot write " + path.string());
    return out;
}

} // namespace

void write_report_csvs(const SolutionReport& report, const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir);

    {
        auto out = open_csv(dir / "capacities.csv");
        out << "technology,capacity\n";
        for (const auto& [tech, cap] : report.capacities) out << tech << "," << num(cap) << "\n";
    }
    {
        auto out = open_csv(dir / "hourly_flows.csv");
        out << "hour,import,export,net_import\n";
        for (std::size_t t = 0; t < report.imports.size(); ++t)
            out << t << "," << num(report.imports[t]) << "," << num(report.exports[t]) << ","
                << num(report.net_imports[t]) << "\n";
    }
    {
        auto out = open_csv(dir / "duration_curve.csv");
        out << "rank,net_import\n";
        for (std::size_t k = 0; k < report.duration.size(); ++k)
            out << k << "," << num(report.duration[k]) << "\n";
    }
    {
        auto out = open_csv(dir / "summary.csv");
        out << "key,value\n";
        out << "scheme," << report.scheme << "\n";
        out << "export_limit," << (report.export_limit ? num(*report.export_limit) : "none") << "\n";
        out << "objective," << num(report.objective_value) << "\n";
        out << "reported_constant," << num(report.reported_constant) << "\n";
        for (const auto& [component, value] : report.cost_breakdown)
            out << "cost_" << component << "," << num(value) << "\n";
        out << "dso_revenue_lifetime," << num(report.dso_revenue_lifetime) << "\n";
        if (report.subscribed_capacity)
            out << "subscribed_capacity," << num(*report.subscribed_capacity) << "\n";
        out << "peak_import," << num(report.peak_import) << "\n";
    }
}

} // namespace zenit
