#pragma once

// Hand-rolled generators for the property tests. Fixed seeds keep every run identical.

#include "taxkin/config.hpp"
#include "taxkin/state.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <random>
#include <vector>

namespace taxkin::testing {

using Rng = std::mt19937_64;

inline double uniform(Rng& rng, double lo, double hi)
{
    return std::uniform_real_distribution<double>(lo, hi)(rng);
}

inline int uniform_int(Rng& rng, int lo, int hi)
{
    return std::uniform_int_distribution<int>(lo, hi)(rng);
}

/// Normalized weights with a random number of exact zeros avoided.
inline std::vector<double> random_weights(Rng& rng, int count)
{
    std::vector<double> w(static_cast<std::size_t>(count));
    double sum = 0.0;
    for (auto& v : w) {
        v = -std::log(uniform(rng, 1e-12, 1.0));
        sum += v;
    }
    for (auto& v : w) {
        v /= sum;
    }
    return w;
}

/// A random configuration satisfying every validation rule.
inline ModelConfig random_config(Rng& rng, int min_n = 2, int max_n = 12, int min_m = 1, int max_m = 4)
{
    ModelConfig c;
    const int n = uniform_int(rng, min_n, max_n);
    const int m = uniform_int(rng, min_m, max_m);
    double r = uniform(rng, 1.0, 30.0);
    double min_gap = 1e300;
    for (int j = 0; j < n; ++j) {
        c.incomes.push_back(r);
        const double gap = uniform(rng, 2.0, 25.0);
        if (j + 1 < n) {
            min_gap = std::min(min_gap, gap);
        }
        r += gap;
    }
    c.exchange_amount = uniform(rng, 0.01, 0.2) * min_gap;
    if (uniform(rng, 0.0, 1.0) < 0.5) {
        c.tau_min = uniform(rng, 0.0, 0.5);
        c.tau_max = uniform(rng, c.tau_min, 1.0);
    } else {
        for (int j = 0; j < n; ++j) {
            c.tax_rates.push_back(uniform(rng, 0.0, 1.0));
        }
    }
    for (int a = 0; a < m; ++a) {
        c.theta_ev.push_back(uniform(rng, 0.0, 1.0));
    }
    std::sort(c.theta_ev.begin(), c.theta_ev.end(), std::greater<>());
    c.sector_shares = random_weights(rng, m);
    return c;
}

inline PopulationState random_simplex_state(Rng& rng, int n, int m)
{
    const auto w = random_weights(rng, n * m);
    PopulationState x(n, m);
    for (int j = 0; j < n; ++j) {
        for (int a = 0; a < m; ++a) {
            x(j, a) = w[static_cast<std::size_t>(j * m + a)];
        }
    }
    return x;
}

}  // namespace taxkin::testing
