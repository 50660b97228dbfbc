#include "support.hpp"

#include "taxkin/error.hpp"
#include "taxkin/tables.hpp"

#include <doctest.h>

#include <cmath>

using namespace taxkin;

TEST_CASE("progressive tax schedule")
{
    const auto tau = build_tax_rates(9, 0.10, 0.45);
    CHECK(tau(0) == doctest::Approx(0.10).epsilon(1e-15));
    CHECK(tau(8) == doctest::Approx(0.45).epsilon(1e-15));
    // 0.10 + 4/8 * 0.35
    CHECK(tau(4) == doctest::Approx(0.275).epsilon(1e-15));
    for (int j = 1; j < 9; ++j) {
        CHECK(tau(j) >= tau(j - 1));
    }

    const auto flat = build_tax_rates(5, 0.3, 0.3);
    for (int j = 0; j < 5; ++j) {
        CHECK(flat(j) == 0.3);
    }
    CHECK_THROWS_AS(build_tax_rates(1, 0.1, 0.2), Error);
}

TEST_CASE("payment matrix for r_j = 10 j")
{
    const auto r = linear_incomes(9, 10.0);
    const auto p = build_payment_matrix(r);
    for (int k = 0; k < 9; ++k) {
        CHECK(p(0, k) == 0.0);
        CHECK(p(k, 8) == 0.0);
    }
    // min(20, 50) / (4 * 90)
    CHECK(p(1, 4) == doctest::Approx(1.0 / 18.0).epsilon(1e-15));
    // diagonal exception 30 / 180 and last-row exception 40 / 180
    CHECK(p(2, 2) == doctest::Approx(1.0 / 6.0).epsilon(1e-15));
    CHECK(p(8, 3) == doctest::Approx(2.0 / 9.0).epsilon(1e-15));
    // first column exception 10 / 180; p(9,1) agrees under both rules
    CHECK(p(5, 0) == doctest::Approx(1.0 / 18.0).epsilon(1e-15));
    CHECK(p(8, 0) == doctest::Approx(1.0 / 18.0).epsilon(1e-15));
    CHECK(p(0, 0) == 0.0);
    CHECK(p(8, 8) == 0.0);
}

TEST_CASE("payment matrix invariants hold for random incomes")
{
    testing::Rng rng(17);
    for (int trial = 0; trial < 200; ++trial) {
        const auto c = testing::random_config(rng);
        const auto p = build_payment_matrix(c.incomes);
        const int n = c.classes();
        for (int h = 0; h < n; ++h) {
            CHECK(p(0, h) == 0.0);
            CHECK(p(h, n - 1) == 0.0);
            for (int k = 0; k < n; ++k) {
                CHECK(p(h, k) >= 0.0);
                CHECK(p(h, k) <= 1.0);
                CHECK(p(h, k) + p(k, h) <= 1.0);
            }
        }
    }
}

TEST_CASE("effective tax table")
{
    const auto tau = build_tax_rates(9, 0.10, 0.45);
    const std::vector<double> theta_ev{1.0, 0.5, 0.25};
    const auto theta = build_effective_tax_table(tau, theta_ev);
    REQUIRE(theta.rows() == 9);
    REQUIRE(theta.cols() == 3);
    for (int k = 0; k < 9; ++k) {
        CHECK(theta(k, 0) == tau(k));
        CHECK(theta(k, 1) == doctest::Approx(0.5 * tau(k)));
        CHECK(theta(k, 2) == doctest::Approx(0.25 * tau(k)));
    }
    CHECK(theta(8, 2) == doctest::Approx(0.1125).epsilon(1e-15));
}

TEST_CASE("direct coefficients")
{
    auto c = reference_config();
    c.theta_ev = {1.0, 0.5, 0.25};
    const auto t = build_tables(c);

    SUBCASE("payer drop from class 2 to class 1")
    {
        // p_22 = 20/180, tau_2 = 0.14375
        const double expected = (1.0 / 9.0) * (1.0 - 0.14375) / 10.0;
        CHECK(direct_coefficient({0, 0}, {1, 0}, {1, 0}, t) == doctest::Approx(expected).epsilon(1e-13));
        CHECK(expected == doctest::Approx(0.0095139).epsilon(1e-5));
    }
    SUBCASE("only neighbouring classes in the same sector")
    {
        for (int h = 0; h < 9; ++h) {
            for (int j = 0; j < 9; ++j) {
                for (int a = 0; a < 3; ++a) {
                    for (int b = 0; b < 3; ++b) {
                        if (std::abs(h - j) > 1 || a != b) {
                            CHECK(direct_coefficient({j, a}, {h, b}, {4, 1}, t) == 0.0);
                        }
                    }
                }
            }
        }
    }
    SUBCASE("out-of-range index is a contract violation")
    {
        CHECK_THROWS_AS(direct_coefficient({9, 0}, {0, 0}, {0, 0}, t), Error);
        CHECK_THROWS_AS(direct_coefficient({0, 0}, {0, 3}, {0, 0}, t), Error);
        CHECK_THROWS_AS(direct_coefficient({0, 0}, {0, 0}, {-1, 0}, t), Error);
    }
}

TEST_CASE("direct coefficients sum to one and stay in [0,1] (random configs)")
{
    testing::Rng rng(2024);
    for (int trial = 0; trial < 60; ++trial) {
        const auto c = testing::random_config(rng, 2, 8, 1, 3);
        const auto t = build_tables(c);
        const int n = t.classes;
        const int m = t.sectors;
        for (int h = 0; h < n; ++h) {
            for (int b = 0; b < m; ++b) {
                for (int k = 0; k < n; ++k) {
                    for (int g = 0; g < m; ++g) {
                        double sum = 0.0;
                        for (int j = 0; j < n; ++j) {
                            for (int a = 0; a < m; ++a) {
                                const double v = direct_coefficient({j, a}, {h, b}, {k, g}, t);
                                CHECK(v >= 0.0);
                                CHECK(v <= 1.0);
                                sum += v;
                            }
                        }
                        CHECK(std::abs(sum - 1.0) <= 1e-12);
                    }
                }
            }
        }
    }
}

TEST_CASE("redistribution terms")
{
    SUBCASE("two-class cancellation")
    {
        ModelConfig c;
        c.incomes = {10.0, 20.0};
        c.exchange_amount = 1.0;
        c.tax_rates = {0.2, 0.3};
        c.theta_ev = {1.0};
        c.sector_shares = {1.0};
        const auto t = build_tables(c);
        CHECK(t.payment(1, 0) == 0.25);
        PopulationState x(2, 1);
        x(0, 0) = 0.3;
        x(1, 0) = 0.7;
        CHECK(std::abs(redistribution_term({0, 0}, {1, 0}, {0, 0}, x, t)) <= 1e-18);
        CHECK(std::abs(redistribution_term({1, 0}, {1, 0}, {0, 0}, x, t)) <= 1e-18);
    }
    SUBCASE("zero when the payer never pays")
    {
        const auto t = build_tables(reference_config());
        testing::Rng rng(5);
        const auto x = testing::random_simplex_state(rng, 9, 3);
        for (int j = 0; j < 9; ++j) {
            CHECK(redistribution_term({j, 0}, {0, 0}, {3, 1}, x, t) == 0.0);
            CHECK(redistribution_term({j, 2}, {4, 2}, {8, 1}, x, t) == 0.0);
        }
    }
    SUBCASE("zero population is singular")
    {
        const auto t = build_tables(reference_config());
        PopulationState x(9, 3);
        CHECK_THROWS_AS(redistribution_term({2, 0}, {3, 0}, {2, 0}, x, t), Error);
    }
}

TEST_CASE("redistribution terms sum to zero at random states, on and off the simplex")
{
    testing::Rng rng(99);
    for (int trial = 0; trial < 40; ++trial) {
        const auto c = testing::random_config(rng, 2, 7, 1, 3);
        const auto t = build_tables(c);
        const int n = t.classes;
        const int m = t.sectors;
        auto x = testing::random_simplex_state(rng, n, m);
        if (trial % 2 == 1) {
            x.values() *= testing::uniform(rng, 0.2, 5.0);
        }
        for (int h = 0; h < n; ++h) {
            for (int b = 0; b < m; ++b) {
                for (int k = 0; k < n; ++k) {
                    for (int g = 0; g < m; ++g) {
                        double sum = 0.0;
                        for (int j = 0; j < n; ++j) {
                            for (int a = 0; a < m; ++a) {
                                sum += redistribution_term({j, a}, {h, b}, {k, g}, x, t);
                            }
                        }
                        CHECK(std::abs(sum) <= 1e-12);
                    }
                }
            }
        }
    }
}
