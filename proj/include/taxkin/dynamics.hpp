#pragma once

#include "taxkin/state.hpp"
#include "taxkin/tables.hpp"

#include <Eigen/Dense>

namespace taxkin {

/// Evaluates dx/dt of the kinetic system in O(n^2 m) by aggregating the
/// per-class payment flows. Holds scratch buffers, so one instance per thread.
class RightHandSide {
public:
    explicit RightHandSide(const CoefficientTables& tables);

    void operator()(const Eigen::MatrixXd& x, Eigen::MatrixXd& dxdt);

    const CoefficientTables& tables() const { return *tables_; }

private:
    const CoefficientTables* tables_;
    Eigen::VectorXd class_mass_;
    Eigen::VectorXd net_received_;  // sum_gamma (1 - theta_{k,gamma}) x_k^gamma
    Eigen::VectorXd tax_due_;       // sum_gamma theta_{k,gamma} x_k^gamma
    Eigen::VectorXd payout_;        // S sum_k p_{h,k} net_received_k, k <= n-1
    Eigen::VectorXd tax_paid_;      // S sum_k p_{h,k} tax_due_k
    Eigen::VectorXd income_rate_;   // S sum_k p_{k,j} X_k, k >= 2
};

/// Right-hand side of the system at `x`. Throws contract_violation on a shape
/// mismatch or non-finite entries.
Eigen::MatrixXd rhs(const PopulationState& x, const CoefficientTables& tables);

}  // namespace taxkin
