#include "taxkin/integrator.hpp"

#include "taxkin/error.hpp"

#include <cmath>
#include <sstream>

namespace taxkin {

namespace {

void clamp_negatives(Eigen::MatrixXd& x)
{
    for (Eigen::Index a = 0; a < x.cols(); ++a) {
        for (Eigen::Index j = 0; j < x.rows(); ++j) {
            double& v = x(j, a);
            if (!std::isfinite(v) || v < -negative_clamp) {
                std::ostringstream os;
                os << "entry (" << j + 1 << ", " << a + 1 << ") became " << v << "; reduce dt";
                fail(ErrorCategory::step_size_too_large, os.str());
            }
            if (v < 0.0) {
                v = 0.0;
            }
        }
    }
}

}  // namespace

void validate(const IntegrationOptions& options)
{
    require(std::isfinite(options.dt) && options.dt > 0.0, ErrorCategory::invalid_config, "dt must be positive");
    require(std::isfinite(options.max_time) && options.max_time > 0.0, ErrorCategory::invalid_config,
            "max_time must be positive");
    require(options.stationarity_tol > 0.0, ErrorCategory::invalid_config, "stationarity_tol must be positive");
    require(options.drift_tol > 0.0, ErrorCategory::invalid_config, "drift_tol must be positive");
}

Rk4Stepper::Rk4Stepper(const CoefficientTables& tables) : rhs_(tables) {}

void Rk4Stepper::advance(Eigen::MatrixXd& x, const Eigen::MatrixXd& slope, double dt)
{
    const double half = 0.5 * dt;
    stage_ = x + half * slope;
    rhs_(stage_, k2_);
    stage_ = x + half * k2_;
    rhs_(stage_, k3_);
    stage_ = x + dt * k3_;
    rhs_(stage_, k4_);
    x += (dt / 6.0) * (slope + 2.0 * k2_ + 2.0 * k3_ + k4_);
    clamp_negatives(x);
}

PopulationState step(const PopulationState& x, const CoefficientTables& tables, double dt)
{
    require(dt > 0.0 && std::isfinite(dt), ErrorCategory::contract_violation, "dt must be positive");
    require(x.classes() == tables.classes && x.sectors() == tables.sectors, ErrorCategory::contract_violation,
            "state shape does not match coefficient tables");
    require(x.values().allFinite(), ErrorCategory::contract_violation, "state has non-finite entries");
    Rk4Stepper stepper(tables);
    Eigen::MatrixXd slope;
    stepper.rhs()(x.values(), slope);
    Eigen::MatrixXd next = x.values();
    stepper.advance(next, slope, dt);
    return PopulationState(std::move(next));
}

StationaryResult evolve_to_stationary(const PopulationState& x0, const CoefficientTables& tables,
                                      const IntegrationOptions& options, const TrajectoryObserver* observer)
{
    validate(options);
    require(x0.classes() == tables.classes && x0.sectors() == tables.sectors, ErrorCategory::contract_violation,
            "initial state shape does not match coefficient tables");
    require(x0.values().allFinite() && x0.values().minCoeff() >= 0.0, ErrorCategory::contract_violation,
            "initial state must be finite and non-negative");
    require(std::abs(x0.total() - 1.0) <= 1e-12, ErrorCategory::contract_violation,
            "initial state must lie on the simplex");

    const double mu0 = x0.global_income(tables.incomes);
    Rk4Stepper stepper(tables);
    Eigen::MatrixXd x = x0.values();
    Eigen::MatrixXd slope;
    stepper.rhs()(x, slope);

    StationaryResult result;
    result.mu = mu0;
    double residual = slope.cwiseAbs().maxCoeff();
    std::int64_t steps = 0;
    double t = 0.0;
    const std::int64_t stride = observer ? std::max<std::int64_t>(observer->stride, 1) : 0;
    if (observer) {
        observer->callback(0.0, PopulationState(x));
    }

    while (residual > options.stationarity_tol && t < options.max_time) {
        stepper.advance(x, slope, options.dt);
        ++steps;
        t = static_cast<double>(steps) * options.dt;

        const double mass_drift = std::abs(x.sum() - 1.0);
        const double mu_drift = std::abs(tables.incomes.dot(x.rowwise().sum()) - mu0);
        result.max_mass_drift = std::max(result.max_mass_drift, mass_drift);
        result.max_mu_drift = std::max(result.max_mu_drift, mu_drift);
        if (mass_drift > options.drift_tol || mu_drift > options.drift_tol) {
            std::ostringstream os;
            os << "at t = " << t << ": |sum x - 1| = " << mass_drift << ", |mu - mu0| = " << mu_drift
               << " exceed drift_tol " << options.drift_tol;
            fail(ErrorCategory::conservation_violation, os.str());
        }

        stepper.rhs()(x, slope);
        residual = slope.cwiseAbs().maxCoeff();
        if (observer && steps % stride == 0) {
            observer->callback(t, PopulationState(x));
        }
    }
    if (observer && steps > 0 && steps % stride != 0) {
        observer->callback(t, PopulationState(x));
    }

    result.state = PopulationState(std::move(x));
    result.final_time = t;
    result.residual = residual;
    result.converged = residual <= options.stationarity_tol;
    result.steps = steps;
    return result;
}

}  // namespace taxkin
