#pragma once

#include <optional>
#include <set>
#include <string>
#include <variant>
#include <vector>

#include "zenit/errors.hpp"

namespace zenit {

class ModelBuilder;

/// Flat volumetric tariff with an annual fixed charge (current Norwegian design).
struct EnergyTariff {
    double fixed_annual = 137.0;  // EUR/yr
    double energy_price = 0.0225; // EUR/kWh
};

/// Time-of-use: base price doubled in peak hours, halved in low hours.
struct TimeOfUseTariff {
    double low = 0.0123;  // EUR/kWh
    double med = 0.0246;  // EUR/kWh
    double peak = 0.0492; // EUR/kWh
    std::set<int> peak_hours = {7, 8, 9, 18, 19, 20};
    std::set<int> low_hours = {23, 0, 1, 2, 3, 4};
};

/// Capacity subscription: annual EUR/kW fee, cheap energy below the subscribed
/// level, expensive excess above it.
struct SubscribedCapacityTariff {
    double capacity_price = 108.0; // EUR/kW/yr
    double below_price = 0.005;    // EUR/kWh
    double above_price = 0.1;      // EUR/kWh
};

/// Scarcity-indexed tariff: elevated price in the top-load fraction of regional
/// hours, with an export bonus in those hours.
struct DynamicTariff {
    double base_price = 0.0225;   // EUR/kWh
    double scarcity_price = 0.1;  // EUR/kWh in flagged hours
    double export_bonus = 0.1;    // EUR/kWh credited for flagged-hour exports
    double scarcity_fraction = 0.05;
};

using TariffScheme = std::variant<EnergyTariff, TimeOfUseTariff, SubscribedCapacityTariff, DynamicTariff>;

std::string scheme_tag(const TariffScheme& scheme); // energy | tou | subscribed | dynamic

/// Throws ValidationError if any scheme invariant is violated.
void validate_tariff(const TariffScheme& scheme);

/// Annual decision-independent charge (137 for Energy, 0 otherwise).
double fixed_annual_charge(const TariffScheme& scheme);

enum class TouBand { low, med, peak };

/// Band of an hour of day under the default band sets.
TouBand tou_band(int hour_of_day);
TouBand tou_band(const TimeOfUseTariff& tariff, int hour_of_day);

struct ScarcityFlags {
    std::vector<bool> flags; // one per hour
    double threshold = 0.0;  // smallest flagged regional load

    bool at(std::size_t t) const { return t < flags.size() && flags[t]; }
    std::size_t count() const;
};

/// Flags the ceil(fraction * T) hours with the highest regional load; ties
/// broken by earlier hour index.
ScarcityFlags scarcity_flags(const std::vector<double>& regional_load, double fraction);

/// Exact annual tariff cost on metered hourly flows (kWh). `subscribed` is
/// only read for the subscribed-capacity scheme, where the below/above split
/// is below_t = min(import_t, subscribed). Dynamic may return a negative cost.
double tariff_cost_expost(const TariffScheme& scheme,
                          const std::vector<double>& imports,
                          const std::vector<double>& exports,
                          const ScarcityFlags& flags,
                          double subscribed = 0.0);

struct TariffTerms {
    int added_variables = 0;
    int added_constraints = 0;
    int objective_coefficients = 0;
};

/// Installs a scheme's objective terms and auxiliary variables/constraints on
/// a model under construction. Annual terms are scaled by the builder's 1/eps
/// lifetime aggregation; fixed annual charges go to the reported constant.
TariffTerms tariff_linear_terms(const TariffScheme& scheme, ModelBuilder& builder,
                                const ScarcityFlags& flags);

} // namespace zenit
