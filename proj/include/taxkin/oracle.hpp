#pragma once

#include "taxkin/state.hpp"
#include "taxkin/tables.hpp"

#include <Eigen/Dense>

namespace taxkin {

/// Group variations produced by one direct payment: the payer slides one
/// class down, the receiver one class up, each at a rate proportional to the
/// net amount S (1 - theta) weighted by p. The four entries sum to zero.
struct InteractionVariation {
    double payer_down = 0.0;     // into (h-1, payer sector)
    double payer_stay = 0.0;     // out of (h, payer sector)
    double receiver_up = 0.0;    // into (k+1, receiver sector)
    double receiver_stay = 0.0;  // out of (k, receiver sector)
};

InteractionVariation interaction_variation(Group payer, Group receiver, const CoefficientTables& tables);

/// C rebuilt as a + b: a = 1 when target == migrant, b collected from the
/// migrant's payer role and receiver role in `interaction_variation`.
double decomposed_coefficient(Group target, Group migrant, Group counterpart, const CoefficientTables& tables);

/// Largest n*m accepted by `rhs_naive_oracle`.
inline constexpr int oracle_max_groups = 100;

/// Brute-force evaluation of dx/dt by full summation over every target,
/// migrant and counterpart group, with C taken from `decomposed_coefficient`.
/// O((n m)^3); refuses instances with n*m > oracle_max_groups.
Eigen::MatrixXd rhs_naive_oracle(const PopulationState& x, const CoefficientTables& tables);

}  // namespace taxkin
