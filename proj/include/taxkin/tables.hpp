#pragma once

#include "taxkin/config.hpp"
#include "taxkin/state.hpp"

#include <Eigen/Dense>

#include <span>

namespace taxkin {

/// A (class, sector) pair, 0-based.
struct Group {
    int cls = 0;
    int sector = 0;
};

/// Precomputed coefficients consumed by the right-hand side. Immutable after
/// construction and safe to share between threads.
struct CoefficientTables {
    int classes = 0;
    int sectors = 0;
    double exchange_amount = 0.0;
    Eigen::VectorXd incomes;    // r_j
    Eigen::VectorXd tax_rates;  // tau_j
    Eigen::MatrixXd payment;    // p_{h,k}: probability that class h pays class k
    Eigen::MatrixXd theta;      // theta_{k,alpha} = theta_ev(alpha) tau_k
    Eigen::VectorXd gap_inv;    // 1 / (r_{j+1} - r_j), length n-1
};

/// Linear progressive schedule tau_j = tau_min + j/(n-1) (tau_max - tau_min), j = 0..n-1.
Eigen::VectorXd build_tax_rates(int classes, double tau_min, double tau_max);

/// The tax schedule the config selects (explicit vector or linear).
Eigen::VectorXd resolve_tax_rates(const ModelConfig& config);

/// Payment probabilities: min(r_h, r_k) / (4 r_n) with the boundary overrides
/// (diagonal, first column, last row set to r / (2 r_n); first row and last
/// column zeroed last).
Eigen::MatrixXd build_payment_matrix(std::span<const double> incomes);

Eigen::MatrixXd build_effective_tax_table(const Eigen::VectorXd& tax_rates, std::span<const double> theta_ev);

/// Validates `config` and builds all tables.
CoefficientTables build_tables(const ModelConfig& config);

/// Probability C that a `migrant` individual ends in group `target` after a
/// direct exchange with a `counterpart`. Nonzero only for migration to a
/// neighbouring class within the migrant's own sector.
double direct_coefficient(Group target, Group migrant, Group counterpart, const CoefficientTables& tables);

/// Tax collection and redistribution variation T of group `target` caused by
/// an encounter of `migrant` (the payer side) with `counterpart`. Both
/// population sums in the formula are evaluated from `x`.
double redistribution_term(Group target, Group migrant, Group counterpart, const PopulationState& x,
                           const CoefficientTables& tables);

}  // namespace taxkin
