#pragma once

#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "zenit/errors.hpp"
#include "zenit/timeseries.hpp"

namespace zenit {

enum class TechLevel { building, neighborhood };
enum class Carrier { electricity, heat, electricity_storage, heat_storage };

std::string to_string(TechLevel level);
std::string to_string(Carrier carrier);
TechLevel parse_tech_level(const std::string& text);
Carrier parse_carrier(const std::string& text);

/// One investable technology. Costs are EUR per kW (producers) or per kWh
/// (storages); the investment cost is already lifetime-discounted including
/// re-investments and salvage.
struct TechnologySpec {
    std::string id;
    TechLevel level = TechLevel::building;
    Carrier carrier = Carrier::electricity;
    double discounted_investment_cost = 0.0; // EUR/kW or EUR/kWh
    double annual_maintenance_cost = 0.0;    // EUR/kW/yr or EUR/kWh/yr
    double efficiency = 1.0;                 // (0,1] for non heat-pump techs
    std::optional<std::string> cop_profile;  // series id, hourly COP (heat pumps)
    std::optional<std::string> fuel;         // fuel id for fuel-burning techs
    double max_capacity = std::numeric_limits<double>::infinity();
    std::optional<double> storage_power_ratio; // kW of charge/discharge per kWh

    bool is_storage() const {
        return carrier == Carrier::electricity_storage || carrier == Carrier::heat_storage;
    }
};

struct FuelSpec {
    std::string id;
    double price = 0.0;      // EUR/kWh fuel
    double co2_factor = 0.0; // gCO2/kWh fuel
};

struct EconomicParams {
    double discount_rate = 0.05;   // per year
    int lifetime_years = 60;
    double grid_tariff_flat = 0.0225; // EUR/kWh, only used inside the Energy scheme
    double retailer_tariff = 0.0;     // EUR/kWh
    double heating_grid_cost = 0.0;   // EUR, lifetime cost, reported constant
    bool heating_grid_enabled = true;
    double el_co2_factor = 17.0;      // gCO2/kWh
};

struct BuildingType {
    std::string id;
    int count = 1;
    std::string electric_load_series;
    std::string heat_load_series;
    double roof_area = 0.0; // m2 per building
};

struct NeighborhoodSpec {
    std::vector<BuildingType> building_types;
    double heating_grid_loss = 0.0; // fraction lost between plant and buildings
    EconomicParams economic;
    std::vector<TechnologySpec> technologies;
    std::vector<FuelSpec> fuels;
};

/// Proof-carrying wrapper: only validate_neighborhood can mint one.
class ValidatedSpec {
public:
    const NeighborhoodSpec& spec() const { return spec_; }
    const NeighborhoodSpec* operator->() const { return &spec_; }
    const NeighborhoodSpec& operator*() const { return spec_; }

private:
    explicit ValidatedSpec(NeighborhoodSpec spec) : spec_(std::move(spec)) {}
    friend ValidatedSpec validate_neighborhood(const NeighborhoodSpec&, const TimeSeriesSet&);

    NeighborhoodSpec spec_;
};

/// Checks every spec invariant and that all referenced series exist with the
/// full horizon. Throws ValidationError listing every violation.
ValidatedSpec validate_neighborhood(const NeighborhoodSpec& spec, const TimeSeriesSet& ts);

/// Idempotent overload: a ValidatedSpec re-validates to itself.
inline ValidatedSpec validate_neighborhood(const ValidatedSpec& spec, const TimeSeriesSet& ts) {
    return validate_neighborhood(spec.spec(), ts);
}

/// Lifetime discount factor: sum over years 1..D of (1+r)^-y.
double discount_factor(double rate, int lifetime_years);

} // namespace zenit
