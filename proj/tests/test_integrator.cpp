#include "support.hpp"

#include "taxkin/error.hpp"
#include "taxkin/experiments.hpp"
#include "taxkin/integrator.hpp"

#include <doctest.h>

#include <cmath>

using namespace taxkin;

namespace {

PopulationState uniform_state()
{
    PopulationState x(9, 3);
    x.values().setConstant(1.0 / 27.0);
    return x;
}

PopulationState integrate(PopulationState x, const CoefficientTables& t, double dt, int steps)
{
    for (int i = 0; i < steps; ++i) {
        x = step(x, t, dt);
    }
    return x;
}

double sup_distance(const PopulationState& a, const PopulationState& b)
{
    return (a.values() - b.values()).cwiseAbs().maxCoeff();
}

}  // namespace

TEST_CASE("a step conserves population mass")
{
    const auto t = build_tables(reference_config());
    testing::Rng rng(3);
    for (int trial = 0; trial < 20; ++trial) {
        const auto x = testing::random_simplex_state(rng, 9, 3);
        const auto y = step(x, t, 0.5);
        CHECK(std::abs(y.total() - x.total()) <= 1e-12);
        CHECK(y.values().minCoeff() >= 0.0);
    }
}

TEST_CASE("RK4 local error shrinks at fifth order")
{
    const auto t = build_tables(reference_config());
    const auto x0 = uniform_state();
    const double dt = 16.0;
    const auto reference = integrate(x0, t, dt / 1024.0, 1024);
    const double coarse = sup_distance(step(x0, t, dt), reference);
    const double fine = sup_distance(integrate(x0, t, dt / 2.0, 2), reference);
    const double observed = std::log2(coarse / fine);
    MESSAGE("observed order " << observed);
    CHECK(observed >= 4.0);
}

TEST_CASE("a step far too large is reported")
{
    const auto t = build_tables(reference_config());
    PopulationState x(9, 3);
    x(0, 0) = 0.5;
    x(8, 2) = 0.5;
    try {
        step(x, t, 400.0);
        FAIL("expected step-size error");
    } catch (const Error& e) {
        CHECK(e.category() == ErrorCategory::step_size_too_large);
        CHECK(std::string(e.what()).find("entry (") != std::string::npos);
    }
}

TEST_CASE("evolution to the stationary state")
{
    const auto t = build_tables(reference_config());
    const IntegrationOptions opts;
    const auto result = evolve_to_stationary(uniform_state(), t, opts);
    REQUIRE(result.converged);
    CHECK(result.residual <= opts.stationarity_tol);
    CHECK(result.mu == doctest::Approx(50.0).epsilon(1e-15));
    CHECK(result.max_mass_drift <= 1e-12);
    CHECK(result.max_mu_drift <= 1e-10);

    SUBCASE("the stationary state is a fixed point of a step")
    {
        IntegrationOptions tight = opts;
        tight.stationarity_tol = 1e-14;
        const auto exact = evolve_to_stationary(result.state, t, tight);
        REQUIRE(exact.converged);
        const auto again = step(exact.state, t, opts.dt);
        CHECK(sup_distance(again, exact.state) <= 1e-12);
    }
    SUBCASE("starting at the stationary state converges immediately")
    {
        const auto second = evolve_to_stationary(result.state, t, opts);
        CHECK(second.converged);
        CHECK(second.final_time == 0.0);
        CHECK(second.steps == 0);
    }
    SUBCASE("halving dt gives the same stationary state")
    {
        IntegrationOptions half = opts;
        half.dt = opts.dt / 2.0;
        const auto other = evolve_to_stationary(uniform_state(), t, half);
        REQUIRE(other.converged);
        CHECK(sup_distance(other.state, result.state) < 1e-6);
    }
    SUBCASE("another start with the same mu reaches the same state")
    {
        InitialConditionSpec ic;
        ic.mode = InitialMode::class_profile;
        ic.profile = {5, 1, 1, 1, 1, 1, 1, 1, 3};
        ic.target_mu = 50.0;
        const auto x0 = make_initial_state(ic, reference_config());
        const auto other = evolve_to_stationary(x0, t, opts);
        REQUIRE(other.converged);
        CHECK(sup_distance(other.state, result.state) < 1e-6);
    }
}

TEST_CASE("non-convergence is reported, not thrown")
{
    const auto t = build_tables(reference_config());
    IntegrationOptions opts;
    opts.max_time = 10.0;
    const auto result = evolve_to_stationary(uniform_state(), t, opts);
    CHECK_FALSE(result.converged);
    CHECK(result.final_time == doctest::Approx(10.0));
    CHECK(result.steps == 20);
    CHECK(result.residual > opts.stationarity_tol);
}

TEST_CASE("drift beyond tolerance is a conservation violation")
{
    const auto t = build_tables(reference_config());
    IntegrationOptions opts;
    opts.drift_tol = 1e-30;
    opts.max_time = 100.0;
    testing::Rng rng(8);
    try {
        evolve_to_stationary(testing::random_simplex_state(rng, 9, 3), t, opts);
        FAIL("expected conservation violation");
    } catch (const Error& e) {
        CHECK(e.category() == ErrorCategory::conservation_violation);
    }
}

TEST_CASE("initial state preconditions")
{
    const auto t = build_tables(reference_config());
    auto x = uniform_state();
    x.values() *= 1.01;
    CHECK_THROWS_AS(evolve_to_stationary(x, t, IntegrationOptions{}), Error);
    x = uniform_state();
    x(0, 0) = -x(0, 0);
    CHECK_THROWS_AS(evolve_to_stationary(x, t, IntegrationOptions{}), Error);
    IntegrationOptions bad;
    bad.dt = 0.0;
    CHECK_THROWS_AS(evolve_to_stationary(uniform_state(), t, bad), Error);
}

TEST_CASE("trajectory observer sees start, stride multiples and the end")
{
    const auto t = build_tables(reference_config());
    IntegrationOptions opts;
    opts.max_time = 10.0;  // 20 steps
    std::vector<double> times;
    TrajectoryObserver observer{6, [&](double time, const PopulationState&) { times.push_back(time); }};
    evolve_to_stationary(uniform_state(), t, opts, &observer);
    CHECK(times == std::vector<double>{0.0, 3.0, 6.0, 9.0, 10.0});
}
