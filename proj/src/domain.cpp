#include "zenit/domain.hpp"

#include <cmath>

namespace zenit {

std::string to_string(TechLevel level) {
    return level == TechLevel::building ? "building" : "neighborhood";
}

std::string to_string(Carrier carrier) {
    switch (carrier) {
    case Carrier::electricity: return "electricity";
    case Carrier::heat: return "heat";
    case Carrier::electricity_storage: return "electricity_storage";
    case Carrier::heat_storage: return "heat_storage";
    }
    return "?";
}

TechLevel parse_tech_level(const std::string& text) {
    if (text == "building") return TechLevel::building;
    if (text == "neighborhood") return TechLevel::neighborhood;
    throw ZenError("BadUnit", "unknown technology level '" + text + "'");
}

Carrier parse_carrier(const std::string& text) {
    if (text == "electricity") return Carrier::electricity;
    if (text == "heat") return Carrier::heat;
    if (text == "electricity_storage") return Carrier::electricity_storage;
    if (text == "heat_storage") return Carrier::heat_storage;
    throw ZenError("BadUnit", "unknown carrier '" + text + "'");
}

double discount_factor(double rate, int lifetime_years) {
    if (rate < 0.0) throw ZenError("BadUnit", "negative discount rate");
    if (lifetime_years < 0) throw ZenError("BadUnit", "negative lifetime");
    if (lifetime_years == 0) return 0.0;
    if (rate == 0.0) return static_cast<double>(lifetime_years);
    // annuity sum: (1 - (1+r)^-D) / r
    return (1.0 - std::pow(1.0 + rate, -lifetime_years)) / rate;
}

namespace {

void check_series(const TimeSeriesSet& ts, const std::string& id, const std::string& owner,
                  std::vector<ValidationIssue>& issues) {
    if (id.empty()) {
        issues.push_back({"MissingSeries", owner + " has an empty series reference"});
        return;
    }
    if (!ts.has(id)) {
        issues.push_back({"MissingSeries", id});
        return;
    }
    if (ts.at(id).values.size() != ts.horizon())
        issues.push_back({"HorizonMismatch", id});
}

} // namespace

ValidatedSpec validate_neighborhood(const NeighborhoodSpec& spec, const TimeSeriesSet& ts) {
    std::vector<ValidationIssue> issues;

    if (spec.building_types.empty())
        issues.push_back({"BadUnit", "at least one building type required"});
    if (spec.heating_grid_loss < 0.0 || spec.heating_grid_loss >= 1.0)
        issues.push_back({"BadUnit", "heating_grid_loss must lie in [0,1)"});

    const auto& econ = spec.economic;
    if (econ.lifetime_years < 1) issues.push_back({"BadUnit", "lifetime_years must be >= 1"});
    if (econ.discount_rate < 0.0) issues.push_back({"BadUnit", "discount_rate must be >= 0"});
    if (econ.grid_tariff_flat < 0.0) issues.push_back({"NegativeCost", "grid_tariff_flat"});
    if (econ.retailer_tariff < 0.0) issues.push_back({"NegativeCost", "retailer_tariff"});
    if (econ.heating_grid_cost < 0.0) issues.push_back({"NegativeCost", "heating_grid_cost"});
    if (econ.el_co2_factor < 0.0) issues.push_back({"BadUnit", "el_co2_factor must be >= 0"});

    for (const auto& bt : spec.building_types) {
        if (bt.count < 1) issues.push_back({"BadUnit", bt.id + ": count must be >= 1"});
        if (bt.roof_area < 0.0) issues.push_back({"BadUnit", bt.id + ": roof_area must be >= 0"});
        check_series(ts, bt.electric_load_series, bt.id, issues);
        check_series(ts, bt.heat_load_series, bt.id, issues);
    }

    for (const auto& tech : spec.technologies) {
        if (tech.discounted_investment_cost < 0.0)
            issues.push_back({"NegativeCost", tech.id + ": discounted_investment_cost"});
        if (tech.annual_maintenance_cost < 0.0)
            issues.push_back({"NegativeCost", tech.id + ": annual_maintenance_cost"});
        if (tech.max_capacity < 0.0)
            issues.push_back({"BadUnit", tech.id + ": max_capacity must be >= 0"});
        if (tech.cop_profile) {
            check_series(ts, *tech.cop_profile, tech.id, issues);
            if (ts.has(*tech.cop_profile)) {
                for (double v : ts.values(*tech.cop_profile)) {
                    if (v < 1.0) {
                        issues.push_back({"BadUnit", tech.id + ": cop_profile values must be >= 1"});
                        break;
                    }
                }
            }
        } else if (tech.efficiency <= 0.0 || tech.efficiency > 1.0) {
            issues.push_back({"BadUnit", tech.id + ": efficiency must lie in (0,1]"});
        }
        if (tech.storage_power_ratio && *tech.storage_power_ratio < 0.0)
            issues.push_back({"BadUnit", tech.id + ": storage_power_ratio must be >= 0"});
        if (tech.fuel) {
            bool found = false;
            for (const auto& fuel : spec.fuels) found |= fuel.id == *tech.fuel;
            if (!found) issues.push_back({"MissingSeries", tech.id + ": unknown fuel '" + *tech.fuel + "'"});
        }
    }

    for (const auto& fuel : spec.fuels) {
        if (fuel.price < 0.0) issues.push_back({"NegativeCost", fuel.id + ": price"});
        if (fuel.co2_factor < 0.0) issues.push_back({"BadUnit", fuel.id + ": co2_factor must be >= 0"});
    }

    // Series every model build relies on.
    for (const char* id : {"spot_price", "regional_load", "insolation", "outdoor_temperature",
                           "ground_temperature"})
        check_series(ts, id, "scenario", issues);

    if (!issues.empty()) throw ValidationError(std::move(issues));
    return ValidatedSpec(spec);
}

} // namespace zenit
