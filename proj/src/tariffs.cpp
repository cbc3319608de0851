#include "zenit/tariffs.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "zenit/model.hpp"
#include "zenit/timeseries.hpp"

namespace zenit {

std::string scheme_tag(const TariffScheme& scheme) {
    struct Tag {
        std::string operator()(const EnergyTariff&) const { return "energy"; }
        std::string operator()(const TimeOfUseTariff&) const { return "tou"; }
        std::string operator()(const SubscribedCapacityTariff&) const { return "subscribed"; }
        std::string operator()(const DynamicTariff&) const { return "dynamic"; }
    };
    return std::visit(Tag{}, scheme);
}

void validate_tariff(const TariffScheme& scheme) {
    std::vector<ValidationIssue> issues;
    std::visit(
        [&](const auto& s) {
            using T = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<T, EnergyTariff>) {
                if (s.fixed_annual < 0.0) issues.push_back({"NegativeCost", "fixed_annual"});
                if (s.energy_price < 0.0) issues.push_back({"NegativeCost", "energy_price"});
            } else if constexpr (std::is_same_v<T, TimeOfUseTariff>) {
                if (s.low < 0.0 || s.med < 0.0 || s.peak < 0.0)
                    issues.push_back({"NegativeCost", "band prices"});
                for (int h : s.peak_hours)
                    if (s.low_hours.count(h))
                        issues.push_back({"BadUnit", "hour " + std::to_string(h) + " in both peak and low bands"});
            } else if constexpr (std::is_same_v<T, SubscribedCapacityTariff>) {
                if (s.capacity_price < 0.0 || s.below_price < 0.0 || s.above_price < 0.0)
                    issues.push_back({"NegativeCost", "subscribed-capacity prices"});
                if (!(s.above_price > s.below_price))
                    issues.push_back({"BadUnit", "above_price must exceed below_price"});
            } else {
                if (s.base_price < 0.0 || s.scarcity_price < 0.0 || s.export_bonus < 0.0)
                    issues.push_back({"NegativeCost", "dynamic prices"});
                if (s.scarcity_fraction <= 0.0 || s.scarcity_fraction >= 1.0)
                    issues.push_back({"BadUnit", "scarcity_fraction must lie in (0,1)"});
            }
        },
        scheme);
    if (!issues.empty()) throw ValidationError(std::move(issues));
}

double fixed_annual_charge(const TariffScheme& scheme) {
    if (const auto* e = std::get_if<EnergyTariff>(&scheme)) return e->fixed_annual;
    return 0.0;
}

TouBand tou_band(int hour_of_day) { return tou_band(TimeOfUseTariff{}, hour_of_day); }

TouBand tou_band(const TimeOfUseTariff& tariff, int hour_of_day) {
    if (hour_of_day < 0 || hour_of_day >= kHoursPerDay)
        throw ZenError("BadUnit", "hour of day out of range: " + std::to_string(hour_of_day));
    if (tariff.peak_hours.count(hour_of_day)) return TouBand::peak;
    if (tariff.low_hours.count(hour_of_day)) return TouBand::low;
    return TouBand::med;
}

std::size_t ScarcityFlags::count() const {
    return static_cast<std::size_t>(std::count(flags.begin(), flags.end(), true));
}

ScarcityFlags scarcity_flags(const std::vector<double>& regional_load, double fraction) {
    const std::size_t n = regional_load.size();
    if (n == 0) throw ZenError("BadUnit", "empty regional load series");
    if (fraction <= 0.0 || fraction >= 1.0)
        throw ZenError("BadUnit", "scarcity fraction must lie in (0,1)");

    const auto k = static_cast<std::size_t>(std::ceil(fraction * static_cast<double>(n)));

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    // highest load first; ties resolved by earlier hour
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return regional_load[a] > regional_load[b];
    });

    ScarcityFlags out;
    out.flags.assign(n, false);
    out.threshold = regional_load[order[k - 1]];
    for (std::size_t i = 0; i < k; ++i) out.flags[order[i]] = true;
    return out;
}

double tariff_cost_expost(const TariffScheme& scheme, const std::vector<double>& imports,
                          const std::vector<double>& exports, const ScarcityFlags& flags,
                          double subscribed) {
    const std::size_t n = imports.size();
    if (!exports.empty() && exports.size() != n)
        throw ZenError("HorizonMismatch", "imports/exports length mismatch");

    return std::visit(
        [&](const auto& s) -> double {
            using T = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<T, EnergyTariff>) {
                double total = 0.0;
                for (double v : imports) total += v;
                return s.fixed_annual + s.energy_price * total;
            } else if constexpr (std::is_same_v<T, TimeOfUseTariff>) {
                double cost = 0.0;
                for (std::size_t t = 0; t < n; ++t) {
                    switch (tou_band(s, hour_of_day(static_cast<int>(t)))) {
                    case TouBand::low: cost += s.low * imports[t]; break;
                    case TouBand::med: cost += s.med * imports[t]; break;
                    case TouBand::peak: cost += s.peak * imports[t]; break;
                    }
                }
                return cost;
            } else if constexpr (std::is_same_v<T, SubscribedCapacityTariff>) {
                if (subscribed < 0.0) throw ZenError("NegativeSubscription", std::to_string(subscribed));
                double cost = s.capacity_price * subscribed;
                for (double v : imports) {
                    const double below = std::min(v, subscribed);
                    cost += s.below_price * below + s.above_price * (v - below);
                }
                return cost;
            } else {
                double cost = 0.0;
                for (std::size_t t = 0; t < n; ++t) {
                    const bool sc = flags.at(t);
                    cost += (sc ? s.scarcity_price : s.base_price) * imports[t];
                    if (sc && t < exports.size()) cost -= s.export_bonus * exports[t];
                }
                return cost;
            }
        },
        scheme);
}

TariffTerms tariff_linear_terms(const TariffScheme& scheme, ModelBuilder& builder,
                                const ScarcityFlags& flags) {
    const auto& imports = builder.import_total_vars();
    const auto& exports = builder.export_total_vars();
    const int horizon = builder.horizon();
    if (static_cast<int>(imports.size()) != horizon || static_cast<int>(exports.size()) != horizon)
        throw ZenError("MissingVariable", "model lacks per-hour import/export total variables");

    const double inv_eps = builder.inv_epsilon();
    TariffTerms terms;

    std::visit(
        [&](const auto& s) {
            using T = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<T, EnergyTariff>) {
                for (int t = 0; t < horizon; ++t)
                    builder.add_objective(CostComponent::tariff, imports[t], inv_eps * s.energy_price);
                builder.add_reported_constant(inv_eps * s.fixed_annual);
                terms.objective_coefficients = horizon;
            } else if constexpr (std::is_same_v<T, TimeOfUseTariff>) {
                for (int t = 0; t < horizon; ++t) {
                    double price = s.med;
                    switch (tou_band(s, hour_of_day(t))) {
                    case TouBand::low: price = s.low; break;
                    case TouBand::med: price = s.med; break;
                    case TouBand::peak: price = s.peak; break;
                    }
                    builder.add_objective(CostComponent::tariff, imports[t], inv_eps * price);
                }
                terms.objective_coefficients = horizon;
            } else if constexpr (std::is_same_v<T, SubscribedCapacityTariff>) {
                const int csub = builder.add_variable("csub");
                builder.set_subscribed_capacity_var(csub);
                builder.register_role("subscribed_capacity", "csub");
                builder.add_objective(CostComponent::tariff, csub, inv_eps * s.capacity_price);
                terms.added_variables = 1;
                terms.objective_coefficients = 1;
                for (int t = 0; t < horizon; ++t) {
                    const std::string ts = std::to_string(t);
                    const int below = builder.add_variable("blw(" + ts + ")");
                    const int above = builder.add_variable("abv(" + ts + ")");
                    builder.add_row("split(" + ts + ")",
                                    {{below, 1.0}, {above, 1.0}, {imports[t], -1.0}}, RowSense::eq, 0.0);
                    builder.add_row("sub(" + ts + ")", {{below, 1.0}, {csub, -1.0}}, RowSense::le, 0.0);
                    builder.add_objective(CostComponent::tariff, below, inv_eps * s.below_price);
                    builder.add_objective(CostComponent::tariff, above, inv_eps * s.above_price);
                    terms.added_variables += 2;
                    terms.added_constraints += 2;
                    terms.objective_coefficients += 2;
                }
                builder.register_role("import_below_subscription", "blw(t)");
                builder.register_role("import_above_subscription", "abv(t)");
            } else {
                for (int t = 0; t < horizon; ++t) {
                    const bool sc = flags.at(static_cast<std::size_t>(t));
                    builder.add_objective(CostComponent::tariff, imports[t],
                                          inv_eps * (sc ? s.scarcity_price : s.base_price));
                    ++terms.objective_coefficients;
                    if (sc) {
                        builder.add_objective(CostComponent::tariff, exports[t], -inv_eps * s.export_bonus);
                        ++terms.objective_coefficients;
                    }
                }
            }
        },
        scheme);

    return terms;
}

} // namespace zenit
