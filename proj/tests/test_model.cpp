#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>

#include "support/fixtures.hpp"
#include "zenit/model.hpp"
#include "zenit/solve.hpp"

using namespace zenit;
namespace fs = std::filesystem;

namespace {

TimeSeriesSet year_with_loads(int horizon, double el, double heat = 0.0, double spot = 0.03) {
    auto ts = testfix::base_year(horizon, spot);
    ts.add(testfix::constant_series("el_load", SeriesUnit::kWhPerHour, horizon, el));
    ts.add(testfix::constant_series("heat_load", SeriesUnit::kWhPerHour, horizon, heat));
    return ts;
}

BuildOptions short_opts(int horizon, bool co2 = false) {
    BuildOptions opts;
    opts.horizon = horizon;
    opts.co2_constraint = co2;
    return opts;
}

double inv_eps_default() { return 1.0 / discount_factor(0.05, 60); }

std::string slurp(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

} // namespace

TEST_CASE("a consumer-only neighborhood imports exactly its load") {
    const int T = 24;
    const auto ts = year_with_loads(T, 10.0);
    const auto spec = validate_neighborhood(testfix::electric_only_spec(), ts);
    const auto model = build_model(spec, ts, EnergyTariff{}, short_opts(T));

    const auto result = solve(model);
    REQUIRE(result.status == SolveStatus::optimal);

    const double inv_eps = inv_eps_default();
    const double expected = inv_eps * (0.03 + 0.0225) * 10.0 * T;
    CHECK(result.objective_value == doctest::Approx(expected).epsilon(1e-8));
    for (int t = 0; t < T; ++t) {
        CHECK(result.value("imp(" + std::to_string(t) + ")") == doctest::Approx(10.0));
        CHECK(result.value("impt(" + std::to_string(t) + ")") == doctest::Approx(10.0));
        CHECK(result.value("expt(" + std::to_string(t) + ")") == doctest::Approx(0.0).scale(1.0));
    }
    // fixed annual charge sits in the reported constant
    CHECK(model.reported_constant == doctest::Approx(137.0 * inv_eps));
}

TEST_CASE("building count scales the served load") {
    const int T = 6;
    const auto ts = year_with_loads(T, 4.0);
    auto raw = testfix::electric_only_spec();
    raw.building_types[0].count = 3;
    const auto spec = validate_neighborhood(raw, ts);
    const auto model = build_model(spec, ts, EnergyTariff{}, short_opts(T));

    const auto result = solve(model);
    REQUIRE(result.status == SolveStatus::optimal);
    CHECK(result.value("imp(0)") == doctest::Approx(12.0));
}

TEST_CASE("the emission balance makes import-only supply infeasible") {
    const int T = 24;
    const auto ts = year_with_loads(T, 10.0);
    const auto spec = validate_neighborhood(testfix::electric_only_spec(), ts);
    const auto model = build_model(spec, ts, EnergyTariff{}, short_opts(T, /*co2=*/true));

    REQUIRE(model.co2_row >= 0);
    const auto result = solve(model);
    CHECK(result.status == SolveStatus::infeasible);
}

TEST_CASE("solar sizing matches a one-dimensional dispatch oracle") {
    const int T = 48;
    auto ts = year_with_loads(T, 8.0);
    auto raw = testfix::electric_only_spec();
    // priced so that offsetting imports pays but pure export capacity does not
    const double invest = 0.006;
    raw.technologies.push_back(testfix::pv_tech("pv", invest, 500.0));
    const auto spec = validate_neighborhood(raw, ts);
    const auto model = build_model(spec, ts, EnergyTariff{}, short_opts(T));

    const auto result = solve(model);
    REQUIRE(result.status == SolveStatus::optimal);

    // For a fixed capacity the hourly dispatch is trivial: cover load first,
    // export the rest. Scan capacities on a fine grid as an oracle.
    const auto& insolation = ts.values("insolation");
    const double inv_eps = inv_eps_default();
    auto cost_at = [&](double x) {
        double cost = invest * x;
        for (int t = 0; t < T; ++t) {
            const double avail = x * insolation[t];
            const double imp = std::max(0.0, 8.0 - avail);
            const double exp = std::max(0.0, avail - 8.0);
            cost += inv_eps * ((0.03 + 0.0225) * imp - 0.03 * exp);
        }
        return cost;
    };
    double best = cost_at(0.0);
    for (double x = 0.0; x <= 500.0; x += 0.05) best = std::min(best, cost_at(x));
    CHECK(result.objective_value <= best + 1e-6);
    CHECK(result.objective_value == doctest::Approx(best).epsilon(1e-4));
    // the oracle's dispatch at the solver's capacity replays its objective
    CHECK(cost_at(result.value("x(pv)")) == doctest::Approx(result.objective_value).epsilon(1e-6));
    CHECK(result.value("x(pv)") > 1.0);
}

TEST_CASE("a battery arbitrages a two-level spot price") {
    const int T = 4;
    TimeSeriesSet ts;
    ts.add(Series{"spot_price", SeriesUnit::EurPerKWh, {0.5, 0.01, 0.5, 0.01}});
    ts.add(Series{"regional_load", SeriesUnit::MW, {1.0, 1.0, 1.0, 1.0}});
    ts.add(testfix::constant_series("insolation", SeriesUnit::kWhPerM2, T, 0.0));
    ts.add(testfix::constant_series("outdoor_temperature", SeriesUnit::Celsius, T, 5.0));
    ts.add(testfix::constant_series("ground_temperature", SeriesUnit::Celsius, T, 6.0));
    ts.add(testfix::constant_series("el_load", SeriesUnit::kWhPerHour, T, 5.0));
    ts.add(testfix::constant_series("heat_load", SeriesUnit::kWhPerHour, T, 0.0));

    auto raw = testfix::electric_only_spec();
    raw.technologies.push_back(testfix::battery_tech("bat", 0.001, 5.0));
    const auto spec = validate_neighborhood(raw, ts);
    const auto model = build_model(spec, ts, EnergyTariff{}, short_opts(T));

    const auto result = solve(model);
    REQUIRE(result.status == SolveStatus::optimal);

    // Optimal plan: buy 10 kWh in each cheap hour, serve the adjacent
    // expensive hour from storage. 5 kWh of capacity suffices.
    const double inv_eps = inv_eps_default();
    const double expected = 0.001 * 5.0 + inv_eps * (0.01 * 20.0 + 0.0225 * 20.0);
    CHECK(result.objective_value == doctest::Approx(expected).epsilon(1e-6));
    CHECK(result.value("x(bat)") == doctest::Approx(5.0).epsilon(1e-5));
    // grid charging is metered: the meter sees 10 in cheap hours, 0 otherwise
    CHECK(result.value("impt(1)") == doctest::Approx(10.0).epsilon(1e-6));
    CHECK(result.value("impt(0)") == doctest::Approx(0.0).scale(1.0));
}

TEST_CASE("a heat pump draws electricity at one over the hourly COP") {
    const int T = 6;
    auto ts = year_with_loads(T, 0.0, /*heat=*/6.0, /*spot=*/0.03);
    ts.add(testfix::constant_series("hp_cop", SeriesUnit::Dimensionless, T, 3.0));

    auto raw = testfix::electric_only_spec();
    TechnologySpec hp;
    hp.id = "hp";
    hp.level = TechLevel::building;
    hp.carrier = Carrier::heat;
    hp.discounted_investment_cost = 0.001;
    hp.cop_profile = "hp_cop";
    raw.technologies.push_back(hp);
    const auto spec = validate_neighborhood(raw, ts);
    const auto model = build_model(spec, ts, EnergyTariff{}, short_opts(T));

    // building-level techs are instantiated per building type
    CHECK(model.capacity_vars.count("hp@bt1") == 1);

    const auto result = solve(model);
    REQUIRE(result.status == SolveStatus::optimal);
    CHECK(result.value("q(hp@bt1,0)") == doctest::Approx(6.0));
    CHECK(result.value("imp(0)") == doctest::Approx(2.0));
}

TEST_CASE("fuel use is output over efficiency and priced in the objective") {
    const int T = 6;
    const auto ts = year_with_loads(T, 0.0, /*heat=*/9.0);

    auto raw = testfix::electric_only_spec();
    TechnologySpec gb;
    gb.id = "gb";
    gb.level = TechLevel::building;
    gb.carrier = Carrier::heat;
    gb.discounted_investment_cost = 0.001;
    gb.efficiency = 0.9;
    gb.fuel = "gas";
    raw.technologies.push_back(gb);
    raw.fuels.push_back({"gas", 0.06, 277.0});
    const auto spec = validate_neighborhood(raw, ts);
    const auto model = build_model(spec, ts, EnergyTariff{}, short_opts(T));

    const auto result = solve(model);
    REQUIRE(result.status == SolveStatus::optimal);
    CHECK(result.value("f(gas,0)") == doctest::Approx(10.0));

    const double inv_eps = inv_eps_default();
    const double expected = 0.001 * 9.0 + inv_eps * 0.06 * 10.0 * T;
    CHECK(result.objective_value == doctest::Approx(expected).epsilon(1e-6));
}

TEST_CASE("an export cap binds the metered export") {
    const int T = 48;
    auto ts = year_with_loads(T, 2.0);
    auto raw = testfix::electric_only_spec();
    // solar cheap enough that even pure export capacity pays
    raw.technologies.push_back(testfix::pv_tech("pv", 0.002, 500.0));
    const auto spec = validate_neighborhood(raw, ts);

    const auto free_model = build_model(spec, ts, EnergyTariff{}, short_opts(T));
    const auto free_result = solve(free_model);
    REQUIRE(free_result.status == SolveStatus::optimal);
    double free_peak = 0.0;
    for (int t = 0; t < T; ++t)
        free_peak = std::max(free_peak, free_result.value("expt(" + std::to_string(t) + ")"));
    REQUIRE(free_peak > 20.0);

    auto capped = short_opts(T);
    capped.export_limit = 10.0;
    const auto cap_model = build_model(spec, ts, EnergyTariff{}, capped);
    const auto cap_result = solve(cap_model);
    REQUIRE(cap_result.status == SolveStatus::optimal);
    for (int t = 0; t < T; ++t)
        CHECK(cap_result.value("expt(" + std::to_string(t) + ")") <= 10.0 + 1e-6);
    CHECK(cap_result.objective_value >= free_result.objective_value - 1e-9);

    auto bad = short_opts(T);
    bad.export_limit = -1.0;
    CHECK_THROWS_AS(build_model(spec, ts, EnergyTariff{}, bad), ZenError);
}

TEST_CASE("the solved point replays exactly against the model") {
    const int T = 24;
    auto ts = year_with_loads(T, 6.0);
    auto raw = testfix::electric_only_spec();
    raw.technologies.push_back(testfix::pv_tech("pv", 1.0, 40.0));
    raw.technologies.push_back(testfix::battery_tech("bat", 0.5, 30.0, 0.95, 0.5));
    const auto spec = validate_neighborhood(raw, ts);
    const auto model = build_model(spec, ts, TimeOfUseTariff{}, short_opts(T));

    const auto result = solve(model);
    REQUIRE(result.status == SolveStatus::optimal);
    const auto point = value_vector(model, result);
    CHECK(std::abs(evaluate_objective(model, point) - result.objective_value) < 1e-6);
    CHECK(max_constraint_violation(model, point) < 1e-6);
}

TEST_CASE("model generation is deterministic") {
    const int T = 24;
    auto ts = year_with_loads(T, 6.0, 3.0);
    ts.add(testfix::constant_series("hp_cop", SeriesUnit::Dimensionless, T, 2.8));
    auto raw = testfix::electric_only_spec();
    raw.technologies.push_back(testfix::pv_tech("pv", 1.0, 40.0));
    raw.technologies.push_back(testfix::battery_tech("bat", 0.5, 30.0, 0.95, 0.5));
    TechnologySpec hp;
    hp.id = "hp";
    hp.level = TechLevel::building;
    hp.carrier = Carrier::heat;
    hp.discounted_investment_cost = 0.8;
    hp.cop_profile = "hp_cop";
    raw.technologies.push_back(hp);
    const auto spec = validate_neighborhood(raw, ts);

    const auto a = build_model(spec, ts, SubscribedCapacityTariff{}, short_opts(T, true));
    const auto b = build_model(spec, ts, SubscribedCapacityTariff{}, short_opts(T, true));

    const auto dir = fs::temp_directory_path() / "zenit_determinism_test";
    fs::create_directories(dir);
    export_lp(a, dir / "a.lp");
    export_lp(b, dir / "b.lp");
    CHECK(slurp(dir / "a.lp") == slurp(dir / "b.lp"));
    REQUIRE(a.variables.size() == b.variables.size());
    for (std::size_t i = 0; i < a.variables.size(); ++i)
        CHECK(a.variables[i].name == b.variables[i].name);
    fs::remove_all(dir);
}

TEST_CASE("flow roles are published for auditing") {
    const int T = 6;
    auto ts = year_with_loads(T, 1.0);
    auto raw = testfix::electric_only_spec();
    raw.technologies.push_back(testfix::battery_tech("bat", 1.0, 10.0));
    const auto spec = validate_neighborhood(raw, ts);
    const auto model = build_model(spec, ts, EnergyTariff{}, short_opts(T));

    for (const char* role : {"capacity", "grid_import_to_load", "metered_import_total",
                             "metered_export_total", "battery_charge_from_grid",
                             "battery_discharge_to_export"})
        CHECK(model.role_registry.count(role) == 1);
    CHECK(static_cast<int>(model.import_total_vars.size()) == T);
    CHECK(static_cast<int>(model.export_total_vars.size()) == T);
}

TEST_CASE("the model horizon cannot exceed the series horizon") {
    const int T = 12;
    const auto ts = year_with_loads(T, 1.0);
    const auto spec = validate_neighborhood(testfix::electric_only_spec(), ts);
    BuildOptions opts;
    opts.horizon = 24;
    opts.co2_constraint = false;
    CHECK_THROWS_AS(build_model(spec, ts, EnergyTariff{}, opts), ZenError);
}

TEST_CASE("scarcity flags come from the regional load only for the dynamic scheme") {
    const int T = 100;
    const auto ts = year_with_loads(T, 1.0);
    const auto dyn = model_scarcity_flags(ts, DynamicTariff{}, T);
    CHECK(dyn.count() == 5);
    const auto flat = model_scarcity_flags(ts, EnergyTariff{}, T);
    CHECK(flat.count() == 0);
    CHECK(flat.flags.size() == 100);
}
