#pragma once

// Shared synthetic fixtures: deterministic series shapes and small
// neighborhood specs used across the test suites.

#include <cmath>
#include <cstdint>
#include <vector>

#include "zenit/domain.hpp"
#include "zenit/timeseries.hpp"

namespace zenit::testfix {

/// Small deterministic generator so fixtures are identical on every platform.
class Lcg {
public:
    explicit Lcg(std::uint64_t seed) : state_(seed ? seed : 0x9e3779b97f4a7c15ull) {}

    std::uint64_t next() {
        state_ = state_ * 6364136223846793005ull + 1442695040888963407ull;
        return state_ >> 11;
    }

    double uniform(double lo, double hi) {
        return lo + (hi - lo) * (static_cast<double>(next() % (1ull << 40)) / static_cast<double>(1ull << 40));
    }

private:
    std::uint64_t state_;
};

inline Series constant_series(const std::string& id, SeriesUnit unit, int horizon, double value) {
    return {id, unit, std::vector<double>(static_cast<std::size_t>(horizon), value)};
}

/// Winter-peaking regional load with a per-hour wobble; the top 5% of hours
/// cluster in cold evenings, in short runs.
inline Series regional_load_series(int horizon, std::uint64_t seed = 7) {
    Lcg rng(seed);
    std::vector<double> values(static_cast<std::size_t>(horizon));
    for (int t = 0; t < horizon; ++t) {
        const int day = t / 24;
        const int hod = t % 24;
        const double seasonal = 1.0 + 0.35 * std::cos(2.0 * M_PI * day / 365.0);
        const double daily = (hod >= 7 && hod <= 9) || (hod >= 17 && hod <= 20) ? 1.25 : 1.0;
        values[static_cast<std::size_t>(t)] = 900.0 * seasonal * daily + rng.uniform(0.0, 40.0);
    }
    return {"regional_load", SeriesUnit::MW, std::move(values)};
}

/// Daylight bell curve capacity factor, stronger in summer, zero at night.
inline Series insolation_series(int horizon) {
    std::vector<double> values(static_cast<std::size_t>(horizon), 0.0);
    for (int t = 0; t < horizon; ++t) {
        const int day = t / 24;
        const int hod = t % 24;
        if (hod < 6 || hod > 20) continue;
        const double diurnal = std::sin(M_PI * (hod - 6) / 14.0);
        const double seasonal = 0.55 - 0.4 * std::cos(2.0 * M_PI * day / 365.0);
        values[static_cast<std::size_t>(t)] = std::max(0.0, diurnal * seasonal);
    }
    return {"insolation", SeriesUnit::kWhPerM2, std::move(values)};
}

inline Series sinus_load_series(const std::string& id, int horizon, double base, double swing,
                                std::uint64_t seed = 11) {
    Lcg rng(seed);
    std::vector<double> values(static_cast<std::size_t>(horizon));
    for (int t = 0; t < horizon; ++t) {
        const int day = t / 24;
        const int hod = t % 24;
        const double seasonal = 1.0 + 0.3 * std::cos(2.0 * M_PI * day / 365.0);
        const double daily = 1.0 + 0.4 * std::sin(2.0 * M_PI * (hod - 5) / 24.0);
        values[static_cast<std::size_t>(t)] =
            std::max(0.0, base * seasonal * daily + rng.uniform(-swing, swing));
    }
    return {id, SeriesUnit::kWhPerHour, std::move(values)};
}

/// Minimal series set every model build needs: flat spot price, shaped
/// regional load, insolation and temperatures.
inline TimeSeriesSet base_year(int horizon, double spot = 0.03) {
    TimeSeriesSet ts;
    ts.add(constant_series("spot_price", SeriesUnit::EurPerKWh, horizon, spot));
    ts.add(regional_load_series(horizon));
    ts.add(insolation_series(horizon));
    ts.add(constant_series("outdoor_temperature", SeriesUnit::Celsius, horizon, 5.0));
    ts.add(constant_series("ground_temperature", SeriesUnit::Celsius, horizon, 6.0));
    return ts;
}

/// One building type with a given electric load series id and zero heat load.
inline NeighborhoodSpec electric_only_spec(const std::string& load_id = "el_load",
                                           const std::string& heat_id = "heat_load") {
    NeighborhoodSpec spec;
    spec.building_types.push_back({"bt1", 1, load_id, heat_id, 0.0});
    spec.economic.heating_grid_enabled = false;
    return spec;
}

inline TechnologySpec pv_tech(const std::string& id, double invest, double max_capacity,
                              TechLevel level = TechLevel::neighborhood) {
    TechnologySpec tech;
    tech.id = id;
    tech.level = level;
    tech.carrier = Carrier::electricity;
    tech.discounted_investment_cost = invest;
    tech.max_capacity = max_capacity;
    return tech;
}

inline TechnologySpec battery_tech(const std::string& id, double invest, double max_capacity,
                                   double efficiency = 1.0, double power_ratio = 1.0) {
    TechnologySpec tech;
    tech.id = id;
    tech.level = TechLevel::neighborhood;
    tech.carrier = Carrier::electricity_storage;
    tech.discounted_investment_cost = invest;
    tech.efficiency = efficiency;
    tech.max_capacity = max_capacity;
    tech.storage_power_ratio = power_ratio;
    return tech;
}

} // namespace zenit::testfix
