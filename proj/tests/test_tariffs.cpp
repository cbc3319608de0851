#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "support/fixtures.hpp"
#include "zenit/model.hpp"
#include "zenit/tariffs.hpp"

using namespace zenit;

namespace {

ScarcityFlags no_flags(std::size_t n) {
    ScarcityFlags f;
    f.flags.assign(n, false);
    return f;
}

} // namespace

TEST_CASE("time-of-use bands partition the day") {
    int low = 0, med = 0, peak = 0;
    for (int h = 0; h < 24; ++h) {
        switch (tou_band(h)) {
        case TouBand::low: ++low; break;
        case TouBand::med: ++med; break;
        case TouBand::peak: ++peak; break;
        }
    }
    CHECK(low == 6);
    CHECK(peak == 6);
    CHECK(med == 12);
    CHECK(tou_band(8) == TouBand::peak);
    CHECK(tou_band(2) == TouBand::low);
    CHECK(tou_band(12) == TouBand::med);
    // band edges under the half-open reading
    CHECK(tou_band(7) == TouBand::peak);
    CHECK(tou_band(10) == TouBand::med);
    CHECK(tou_band(18) == TouBand::peak);
    CHECK(tou_band(21) == TouBand::med);
    CHECK(tou_band(23) == TouBand::low);
    CHECK(tou_band(5) == TouBand::med);
}

TEST_CASE("scarcity flags pick the top-load hours") {
    std::vector<double> ascending(100);
    for (int i = 0; i < 100; ++i) ascending[i] = i;
    const auto flags = scarcity_flags(ascending, 0.05);
    CHECK(flags.count() == 5);
    for (int i = 95; i < 100; ++i) CHECK(flags.flags[i]);
    CHECK(flags.threshold == 95.0);
}

TEST_CASE("scarcity ties break toward earlier hours") {
    std::vector<double> constant(100, 3.0);
    const auto flags = scarcity_flags(constant, 0.05);
    CHECK(flags.count() == 5);
    for (int i = 0; i < 5; ++i) CHECK(flags.flags[i]);
    for (int i = 5; i < 100; ++i) CHECK(!flags.flags[i]);
}

TEST_CASE("full year default fraction flags exactly 438 hours") {
    const auto series = testfix::regional_load_series(kHoursPerYear);
    const auto flags = scarcity_flags(series.values, 0.05);
    CHECK(flags.count() == 438);
}

TEST_CASE("scarcity flags are scale invariant") {
    const auto series = testfix::regional_load_series(2000, 99);
    const auto flags = scarcity_flags(series.values, 0.07);
    for (double alpha : {0.5, 2.0, 17.0}) {
        std::vector<double> scaled;
        for (double v : series.values) scaled.push_back(alpha * v);
        const auto scaled_flags = scarcity_flags(scaled, 0.07);
        REQUIRE(scaled_flags.flags == flags.flags);
    }
}

TEST_CASE("energy tariff cost matches the closed form") {
    std::vector<double> imports(1000, 10.0); // sums to 10000
    const double cost = tariff_cost_expost(EnergyTariff{}, imports, {}, no_flags(1000));
    CHECK(std::abs(cost - 362.0) < 1e-9);
}

TEST_CASE("subscribed capacity splits at the subscription") {
    std::vector<double> imports{12.0};
    const double cost =
        tariff_cost_expost(SubscribedCapacityTariff{}, imports, {}, no_flags(1), 10.0);
    CHECK(std::abs(cost - 1080.25) < 1e-9);
    CHECK_THROWS_AS(
        tariff_cost_expost(SubscribedCapacityTariff{}, imports, {}, no_flags(1), -1.0), ZenError);
}

TEST_CASE("dynamic tariff prices scarcity hours and bonuses exports") {
    std::vector<double> imports{5.0, 10.0};
    ScarcityFlags flags;
    flags.flags = {true, false};
    const double cost = tariff_cost_expost(DynamicTariff{}, imports, {}, flags);
    CHECK(std::abs(cost - 0.725) < 1e-9);

    std::vector<double> exports{2.0, 100.0};
    const double with_exports = tariff_cost_expost(DynamicTariff{}, imports, exports, flags);
    CHECK(std::abs(with_exports - (0.725 - 0.1 * 2.0)) < 1e-9);
}

TEST_CASE("zero flows leave only fixed terms") {
    std::vector<double> zero(48, 0.0);
    const auto flags = no_flags(48);
    CHECK(tariff_cost_expost(EnergyTariff{}, zero, zero, flags) == doctest::Approx(137.0));
    CHECK(tariff_cost_expost(TimeOfUseTariff{}, zero, zero, flags) == 0.0);
    CHECK(tariff_cost_expost(SubscribedCapacityTariff{}, zero, zero, flags, 0.0) == 0.0);
    CHECK(tariff_cost_expost(DynamicTariff{}, zero, zero, flags) == 0.0);
}

TEST_CASE("dynamic with no flagged hours equals energy minus the fixed charge") {
    testfix::Lcg rng(5);
    std::vector<double> imports, exports;
    for (int t = 0; t < 500; ++t) {
        imports.push_back(rng.uniform(0.0, 30.0));
        exports.push_back(rng.uniform(0.0, 10.0));
    }
    const auto flags = no_flags(500);
    const double dynamic = tariff_cost_expost(DynamicTariff{}, imports, exports, flags);
    const double energy = tariff_cost_expost(EnergyTariff{}, imports, exports, flags);
    CHECK(dynamic == doctest::Approx(energy - 137.0).epsilon(1e-12));
}

namespace {

/// Builder with per-hour metered import/export variables already in place.
ModelBuilder metered_builder(int horizon, double inv_eps = 1.0) {
    ModelBuilder b(horizon, inv_eps);
    std::vector<int> imp, exp;
    for (int t = 0; t < horizon; ++t) imp.push_back(b.add_variable("impt(" + std::to_string(t) + ")"));
    for (int t = 0; t < horizon; ++t) exp.push_back(b.add_variable("expt(" + std::to_string(t) + ")"));
    b.set_import_total_vars(imp);
    b.set_export_total_vars(exp);
    return b;
}

int nonzero_objective_terms(const ModelInstance& m) {
    int n = 0;
    for (double c : m.objective) n += c != 0.0;
    return n;
}

} // namespace

TEST_CASE("subscribed-capacity terms add 7 variables and 6 constraints on 3 hours") {
    auto b = metered_builder(3);
    const int vars_before = b.variable_count();
    const int rows_before = b.row_count();
    const auto terms = tariff_linear_terms(SubscribedCapacityTariff{}, b, no_flags(3));
    CHECK(terms.added_variables == 7);
    CHECK(terms.added_constraints == 6);
    CHECK(b.variable_count() - vars_before == 7);
    CHECK(b.row_count() - rows_before == 6);
    const auto m = b.build();
    CHECK(m.subscribed_capacity_var >= 0);
}

TEST_CASE("energy terms add no variables, no constraints, T coefficients") {
    auto b = metered_builder(5);
    const int vars_before = b.variable_count();
    const int rows_before = b.row_count();
    const auto terms = tariff_linear_terms(EnergyTariff{}, b, no_flags(5));
    CHECK(terms.added_variables == 0);
    CHECK(terms.added_constraints == 0);
    CHECK(terms.objective_coefficients == 5);
    CHECK(b.variable_count() == vars_before);
    CHECK(b.row_count() == rows_before);
    const auto m = b.build();
    CHECK(nonzero_objective_terms(m) == 5);
    // the fixed annual charge lands in the reported constant, not the objective
    CHECK(m.reported_constant == doctest::Approx(137.0));
}

TEST_CASE("dynamic with all flags false reduces to the energy variable part") {
    auto be = metered_builder(6);
    tariff_linear_terms(EnergyTariff{}, be, no_flags(6));
    const auto me = be.build();

    auto bd = metered_builder(6);
    tariff_linear_terms(DynamicTariff{}, bd, no_flags(6));
    const auto md = bd.build();

    REQUIRE(me.objective.size() == md.objective.size());
    for (std::size_t i = 0; i < me.objective.size(); ++i)
        CHECK(me.objective[i] == doctest::Approx(md.objective[i]).epsilon(1e-15));
    CHECK(md.reported_constant == 0.0);
}

TEST_CASE("tariff terms scale annual prices by the lifetime aggregation") {
    const double inv_eps = 1.0 / 18.92928883;
    auto b = metered_builder(2, inv_eps);
    tariff_linear_terms(EnergyTariff{}, b, no_flags(2));
    const auto m = b.build();
    CHECK(m.objective[m.var("impt(0)")] == doctest::Approx(0.0225 * inv_eps).epsilon(1e-12));
}

TEST_CASE("tariff terms require the metering variables") {
    ModelBuilder b(3, 1.0);
    CHECK_THROWS_AS(tariff_linear_terms(EnergyTariff{}, b, no_flags(3)), ZenError);
}

TEST_CASE("tariff invariants are validated") {
    SubscribedCapacityTariff bad;
    bad.above_price = bad.below_price;
    CHECK_THROWS_AS(validate_tariff(TariffScheme{bad}), ValidationError);

    TimeOfUseTariff overlap;
    overlap.low_hours.insert(8); // also a peak hour
    CHECK_THROWS_AS(validate_tariff(TariffScheme{overlap}), ValidationError);

    DynamicTariff frac;
    frac.scarcity_fraction = 1.5;
    CHECK_THROWS_AS(validate_tariff(TariffScheme{frac}), ValidationError);

    CHECK_NOTHROW(validate_tariff(TariffScheme{EnergyTariff{}}));
}
