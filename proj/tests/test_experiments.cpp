#include "taxkin/error.hpp"
#include "taxkin/experiments.hpp"

#include <doctest.h>

#include <cmath>

using namespace taxkin;

namespace {

ErrorCategory category_of(auto&& f)
{
    try {
        f();
    } catch (const Error& e) {
        return e.category();
    }
    FAIL("expected an error");
    return ErrorCategory::io;
}

}  // namespace

TEST_CASE("initial conditions")
{
    const auto config = reference_config();

    SUBCASE("uniform")
    {
        const auto x = make_initial_state({}, config);
        CHECK(x.total() == doctest::Approx(1.0).epsilon(1e-15));
        CHECK(x.global_income(Eigen::Map<const Eigen::VectorXd>(config.incomes.data(), 9)) == doctest::Approx(50.0));
        CHECK(x(4, 1) == doctest::Approx(1.0 / 27.0));
    }
    SUBCASE("class profile tilted to a target income")
    {
        InitialConditionSpec ic;
        ic.mode = InitialMode::class_profile;
        ic.profile = {9, 1, 1, 1, 1, 1, 1, 1, 1};
        ic.target_mu = 42.0;
        const auto x = make_initial_state(ic, config);
        const Eigen::Map<const Eigen::VectorXd> r(config.incomes.data(), 9);
        CHECK(std::abs(x.total() - 1.0) <= 1e-14);
        CHECK(std::abs(x.global_income(r) - 42.0) <= 1e-10);
        for (int j = 0; j < 9; ++j) {
            // same sector split in every class
            CHECK(x(j, 0) == doctest::Approx(x(j, 2)));
        }
        ic.target_mu = 95.0;
        CHECK(category_of([&] { make_initial_state(ic, config); }) == ErrorCategory::invalid_config);
    }
    SUBCASE("class profile without a target keeps its mean")
    {
        InitialConditionSpec ic;
        ic.mode = InitialMode::class_profile;
        ic.profile = {1, 0, 0, 0, 0, 0, 0, 0, 1};
        const auto x = make_initial_state(ic, config);
        CHECK(x.class_marginals()(0) == doctest::Approx(0.5));
        CHECK(x.class_marginals()(4) == 0.0);
    }
    SUBCASE("explicit state must sit on the simplex")
    {
        InitialConditionSpec ic;
        ic.mode = InitialMode::explicit_state;
        ic.state = Eigen::MatrixXd::Constant(9, 3, 1.0 / 27.0);
        CHECK_NOTHROW(make_initial_state(ic, config));
        ic.state = Eigen::MatrixXd::Constant(9, 3, 1.0 / 20.0);
        CHECK(category_of([&] { make_initial_state(ic, config); }) == ErrorCategory::invalid_config);
        ic.state = Eigen::MatrixXd::Constant(8, 3, 1.0 / 24.0);
        CHECK(category_of([&] { make_initial_state(ic, config); }) == ErrorCategory::invalid_config);
    }
}

TEST_CASE("quadratic fit through the origin")
{
    SUBCASE("exact recovery")
    {
        std::vector<std::pair<double, double>> pts;
        for (double eta : {0.05, 0.1, 0.2, 0.35, 0.5}) {
            pts.emplace_back(eta, 0.42 * eta * eta + 0.62 * eta);
        }
        const auto fit = fit_quadratic_through_origin(pts);
        CHECK(std::abs(fit.quadratic - 0.42) <= 1e-10);
        CHECK(std::abs(fit.linear - 0.62) <= 1e-10);
    }
    SUBCASE("published sweep values")
    {
        const std::vector<std::pair<double, double>> pts{{0.05, 0.035}, {0.10, 0.068}, {0.15, 0.108},
                                                         {0.20, 0.146}, {0.25, 0.181}, {0.30, 0.215},
                                                         {0.40, 0.318}, {0.50, 0.418}};
        const auto fit = fit_quadratic_through_origin(pts);
        MESSAGE("fit " << fit.quadratic << " eta^2 + " << fit.linear << " eta");
        CHECK(std::abs(fit.quadratic - 0.42) <= 0.05);
        CHECK(std::abs(fit.linear - 0.62) <= 0.05);
    }
    SUBCASE("all zero")
    {
        const std::vector<std::pair<double, double>> pts{{0.1, 0.0}, {0.2, 0.0}, {0.3, 0.0}};
        const auto fit = fit_quadratic_through_origin(pts);
        CHECK(fit.quadratic == 0.0);
        CHECK(fit.linear == 0.0);
    }
    SUBCASE("underdetermined")
    {
        const std::vector<std::pair<double, double>> one{{0.1, 0.05}, {0.1, 0.06}, {0.0, 0.0}};
        CHECK(category_of([&] { fit_quadratic_through_origin(one); }) == ErrorCategory::underdetermined_fit);
        CHECK(category_of([&] { fit_quadratic_through_origin({}); }) == ErrorCategory::underdetermined_fit);
    }
}

TEST_CASE("scenario runs")
{
    const IntegrationOptions opts;
    SUBCASE("full compliance has no income gap")
    {
        auto config = reference_config();
        config.theta_ev = {1.0, 1.0, 1.0};
        const auto r = run_scenario(config, {}, opts);
        CHECK(r.stationary.converged);
        REQUIRE(r.metrics.income_gap.has_value());
        CHECK(std::abs(*r.metrics.income_gap) <= 1e-6);
        CHECK(r.metrics.mu_total == doctest::Approx(50.0).epsilon(1e-12));
    }
    SUBCASE("evaders outnumber honest payers at the top")
    {
        const auto r = run_scenario(reference_config(), {}, opts);
        REQUIRE(r.stationary.converged);
        const auto& x = r.stationary.state;
        CHECK(x(0, 0) > x(0, 1));
        CHECK(x(0, 1) > x(0, 2));
        CHECK(x(8, 0) < x(8, 1));
        CHECK(x(8, 1) < x(8, 2));
    }
}

TEST_CASE("evasion sweep")
{
    const IntegrationOptions opts;
    const auto base = reference_config();

    SUBCASE("rows sorted by eta, zero level matches compliance")
    {
        const std::vector<double> etas{0.2, 0.0, 0.1};
        const auto rows = evasion_sweep(base, etas, {}, opts);
        REQUIRE(rows.size() == 3);
        CHECK(rows[0].eta == 0.0);
        CHECK(rows[1].eta == 0.1);
        CHECK(rows[2].eta == 0.2);
        CHECK(rows[2].theta == std::array<double, 3>{1.0, 0.8, 0.6});
        CHECK(std::abs(rows[0].income_gap) <= 1e-12);

        auto honest = base;
        honest.theta_ev = {1.0, 1.0, 1.0};
        const auto baseline = run_scenario(honest, {}, opts);
        CHECK(rows[0].gini_total == baseline.metrics.gini_total);
        CHECK(rows[1].income_gap < rows[2].income_gap);
    }
    SUBCASE("parallel and sequential runs are bit-identical")
    {
        const std::vector<double> etas{0.05, 0.3};
        const auto a = evasion_sweep(base, etas, {}, opts, true);
        const auto b = evasion_sweep(base, etas, {}, opts, false);
        REQUIRE(a.size() == b.size());
        for (std::size_t i = 0; i < a.size(); ++i) {
            CHECK(a[i].income_gap == b[i].income_gap);
            CHECK(a[i].gini_total == b[i].gini_total);
            CHECK(a[i].residual == b[i].residual);
        }
    }
    SUBCASE("invalid points and setups")
    {
        const std::vector<double> too_much{0.1, 0.6};
        CHECK(category_of([&] { evasion_sweep(base, too_much, {}, opts); }) == ErrorCategory::invalid_sweep_point);
        auto two = base;
        two.theta_ev = {1.0, 0.5};
        two.sector_shares = {0.5, 0.5};
        const std::vector<double> ok{0.1};
        CHECK(category_of([&] { evasion_sweep(two, ok, {}, opts); }) == ErrorCategory::invalid_config);
    }
}

TEST_CASE("compliance comparison")
{
    const IntegrationOptions opts;
    SUBCASE("compliance against itself")
    {
        auto honest = reference_config();
        honest.theta_ev = {1.0, 1.0, 1.0};
        const auto c = compare_compliance_vs_evasion(honest, {}, opts);
        CHECK(c.delta.cwiseAbs().maxCoeff() == 0.0);
    }
    SUBCASE("evasion hollows out the middle")
    {
        const auto c = compare_compliance_vs_evasion(reference_config(), {}, opts);
        CHECK(std::abs(c.delta.sum()) <= 1e-12);
        CHECK(c.delta(0) > 0.0);
        CHECK(c.delta(8) > 0.0);
        for (int j = 3; j <= 5; ++j) {
            CHECK(c.delta(j) < 0.0);
        }
    }
}

TEST_CASE("spread comparison")
{
    const auto s = spread_comparison(reference_config(), {}, IntegrationOptions{});
    CHECK(s.eta_widespread == doctest::Approx(1.0 / 6.0));
    CHECK(s.eta_concentrated == doctest::Approx(1.0 / 6.0));
    CHECK(std::abs(s.gini_widespread - s.gini_concentrated) < 0.01);
    for (const auto& g : s.sector_gini_widespread) {
        CHECK(std::abs(*g - s.gini_widespread) < 0.02);
    }
}

// Measured: the worst-evader sector sits 0.026 below the total Gini (0.254 vs 0.280)
// under the uniform start, so the 0.02 band is not met for the concentrated case.
TEST_CASE("concentrated evasion keeps sector Ginis within 0.02 of the total" * doctest::should_fail())
{
    const auto s = spread_comparison(reference_config(), {}, IntegrationOptions{});
    for (const auto& g : s.sector_gini_concentrated) {
        CHECK(std::abs(*g - s.gini_concentrated) < 0.02);
    }
}
