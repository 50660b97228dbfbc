#pragma once

#include "taxkin/config.hpp"
#include "taxkin/integrator.hpp"
#include "taxkin/metrics.hpp"
#include "taxkin/state.hpp"

#include <Eigen/Dense>

#include <array>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace taxkin {

enum class InitialMode { uniform, explicit_state, class_profile };

std::string_view to_string(InitialMode mode);
InitialMode parse_initial_mode(std::string_view text);

/// How the starting distribution is built. In every generated mode each class
/// is split across sectors by `sector_shares`.
struct InitialConditionSpec {
    InitialMode mode = InitialMode::uniform;
    std::optional<Eigen::MatrixXd> state;  // explicit_state: n x m fractions
    std::vector<double> profile;           // class_profile: relative class weights u_j
    std::optional<double> target_mu;       // class_profile: tilt u to this global income
};

/// uniform: x_j^alpha = w_alpha / n. class_profile: x_j^alpha = u_j w_alpha with
/// u normalized and, if requested, exponentially tilted (u_j e^{lambda r_j}) so
/// that sum_j r_j u_j hits target_mu.
PopulationState make_initial_state(const InitialConditionSpec& ic, const ModelConfig& config);

struct ScenarioResult {
    StationaryResult stationary;
    MetricsReport metrics;
};

ScenarioResult run_scenario(const ModelConfig& config, const InitialConditionSpec& ic,
                            const IntegrationOptions& options, const TrajectoryObserver* observer = nullptr);

struct SweepRow {
    double eta = 0.0;
    std::array<double, 3> theta{};
    double income_gap = 0.0;
    double gini_total = 0.0;
    bool converged = false;
    double residual = 0.0;
    double mu = 0.0;
};

/// Evasion levels of the reference sweep, as fractions.
std::vector<double> table_sweep_levels();

/// For each eta sets theta_ev = (1, 1 - eta, 1 - 2 eta) on `base` (three equal
/// sectors) and runs from the same initial condition. Points run concurrently
/// when `parallel`; rows come back sorted by eta either way.
std::vector<SweepRow> evasion_sweep(const ModelConfig& base, std::span<const double> etas,
                                    const InitialConditionSpec& ic, const IntegrationOptions& options,
                                    bool parallel = true);

struct QuadraticFit {
    double quadratic = 0.0;  // a in d = a eta^2 + b eta
    double linear = 0.0;     // b
};

/// Least squares d ~ a eta^2 + b eta through the origin via the 2x2 normal equations.
QuadraticFit fit_quadratic_through_origin(std::span<const std::pair<double, double>> points);

struct ComplianceComparison {
    Eigen::VectorXd delta;  // X_j(evasion) - X_j(compliance)
    ScenarioResult evasion;
    ScenarioResult compliance;
};

/// Runs `config` and its full-compliance twin (theta_ev all 1) from the same start.
ComplianceComparison compare_compliance_vs_evasion(const ModelConfig& config, const InitialConditionSpec& ic,
                                                   const IntegrationOptions& options);

struct SpreadComparison {
    double eta_widespread = 0.0;
    double eta_concentrated = 0.0;
    double gini_widespread = 0.0;
    double gini_concentrated = 0.0;
    std::vector<std::optional<double>> sector_gini_widespread;
    std::vector<std::optional<double>> sector_gini_concentrated;
};

/// Widespread theta_ev = (1, .75, .75) against concentrated (1, 1, .5); both at
/// total evasion level 1/6 over three equal sectors.
SpreadComparison spread_comparison(const ModelConfig& base, const InitialConditionSpec& ic,
                                   const IntegrationOptions& options);

}  // namespace taxkin
