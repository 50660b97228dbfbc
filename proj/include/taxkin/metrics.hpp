#pragma once

#include "taxkin/config.hpp"
#include "taxkin/state.hpp"

#include <Eigen/Dense>

#include <optional>
#include <span>
#include <vector>

namespace taxkin {

/// Sectors with at most this much mass get undefined sector metrics.
inline constexpr double empty_sector_mass = 1e-12;

struct MetricsReport {
    Eigen::VectorXd class_marginals;   // X_j
    Eigen::VectorXd sector_marginals;  // W_alpha
    double mu_total = 0.0;
    std::vector<std::optional<double>> sector_mean_income;
    double gini_total = 0.0;
    std::vector<std::optional<double>> gini_per_sector;
    /// (mu_m - mu_1) / mu_1; undefined when sector 1 or m is empty.
    std::optional<double> income_gap;
};

/// Mean-absolute-difference Gini of a class-binned distribution:
/// sum_ij w_i w_j |r_i - r_j| / (2 sum_i w_i r_i) with weights normalized to 1.
double gini(std::span<const double> weights, std::span<const double> incomes);
double gini(const Eigen::VectorXd& weights, const Eigen::VectorXd& incomes);

/// Sector 1 is the reference (honest) sector and sector m the worst evader, so
/// sectors are expected in non-increasing theta_ev order.
MetricsReport metrics_report(const PopulationState& x, const ModelConfig& config);

/// eta = sum_alpha w_alpha (1 - theta_ev(alpha)).
double total_evasion_level(std::span<const double> shares, std::span<const double> theta_ev);

}  // namespace taxkin
