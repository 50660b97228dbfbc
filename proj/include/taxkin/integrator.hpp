#pragma once

#include "taxkin/dynamics.hpp"
#include "taxkin/state.hpp"
#include "taxkin/tables.hpp"

#include <cstdint>
#include <functional>

namespace taxkin {

struct IntegrationOptions {
    double dt = 0.5;
    double max_time = 1e6;
    double stationarity_tol = 1e-9;  // on max |dx/dt|
    double drift_tol = 1e-8;         // on |sum x - 1| and |mu - mu0|
};

void validate(const IntegrationOptions& options);

struct StationaryResult {
    PopulationState state;
    double final_time = 0.0;
    double residual = 0.0;
    bool converged = false;
    double mu = 0.0;
    std::int64_t steps = 0;
    double max_mass_drift = 0.0;
    double max_mu_drift = 0.0;
};

/// Called with (time, state) at t = 0, every `stride` steps and at the final state.
struct TrajectoryObserver {
    std::int64_t stride = 1;
    std::function<void(double, const PopulationState&)> callback;
};

/// Negative entries down to this magnitude are treated as roundoff and zeroed.
inline constexpr double negative_clamp = 1e-14;

/// Classic RK4 with reusable stage buffers.
class Rk4Stepper {
public:
    explicit Rk4Stepper(const CoefficientTables& tables);

    /// Advances `x` in place by `dt`; `slope` must hold dx/dt at `x`.
    void advance(Eigen::MatrixXd& x, const Eigen::MatrixXd& slope, double dt);

    RightHandSide& rhs() { return rhs_; }

private:
    RightHandSide rhs_;
    Eigen::MatrixXd k2_, k3_, k4_, stage_;
};

/// One RK4 step followed by the non-negativity clamp. Throws
/// step_size_too_large if an entry drops below -negative_clamp.
PopulationState step(const PopulationState& x, const CoefficientTables& tables, double dt);

/// Integrates until max |dx/dt| <= stationarity_tol or max_time is reached.
/// Non-convergence is reported through `converged`; drift beyond drift_tol
/// throws conservation_violation.
StationaryResult evolve_to_stationary(const PopulationState& x0, const CoefficientTables& tables,
                                      const IntegrationOptions& options,
                                      const TrajectoryObserver* observer = nullptr);

}  // namespace taxkin
