#include "taxkin/experiments.hpp"

#include "taxkin/error.hpp"
#include "taxkin/tables.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <sstream>

namespace taxkin {

namespace {

void require_three_equal_sectors(const ModelConfig& config, const char* what)
{
    require(config.sectors() == 3, ErrorCategory::invalid_config, std::string(what) + " needs m = 3");
    for (double w : config.sector_shares) {
        require(std::abs(w - 1.0 / 3.0) <= 1e-12, ErrorCategory::invalid_config,
                std::string(what) + " needs equal sector shares of 1/3");
    }
}

// Mean of r under weights u_j exp(lambda r_j), shifted for stability.
double tilted_mean(const std::vector<double>& u, const std::vector<double>& r, double lambda)
{
    const double shift = lambda >= 0.0 ? r.back() : r.front();
    double mass = 0.0;
    double income = 0.0;
    for (std::size_t j = 0; j < u.size(); ++j) {
        const double w = u[j] * std::exp(lambda * (r[j] - shift));
        mass += w;
        income += w * r[j];
    }
    return income / mass;
}

std::vector<double> tilt_to_mean(const std::vector<double>& u, const std::vector<double>& r, double target)
{
    double lo_r = 0.0;
    double hi_r = 0.0;
    bool first = true;
    for (std::size_t j = 0; j < u.size(); ++j) {
        if (u[j] > 0.0) {
            lo_r = first ? r[j] : std::min(lo_r, r[j]);
            hi_r = first ? r[j] : std::max(hi_r, r[j]);
            first = false;
        }
    }
    {
        std::ostringstream os;
        os << "target mu " << target << " must lie strictly inside the profile's income range (" << lo_r << ", "
           << hi_r << ")";
        require(target > lo_r && target < hi_r, ErrorCategory::invalid_config, os.str());
    }

    const double scale = 1.0 / (hi_r - lo_r);
    double lo = -scale;
    double hi = scale;
    while (tilted_mean(u, r, lo) > target) {
        lo *= 2.0;
    }
    while (tilted_mean(u, r, hi) < target) {
        hi *= 2.0;
    }
    for (int it = 0; it < 200 && hi - lo > 0.0; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (mid == lo || mid == hi) {
            break;
        }
        (tilted_mean(u, r, mid) < target ? lo : hi) = mid;
    }
    const double lambda = 0.5 * (lo + hi);
    const double shift = lambda >= 0.0 ? r.back() : r.front();
    std::vector<double> tilted(u.size());
    double mass = 0.0;
    for (std::size_t j = 0; j < u.size(); ++j) {
        tilted[j] = u[j] * std::exp(lambda * (r[j] - shift));
        mass += tilted[j];
    }
    for (double& v : tilted) {
        v /= mass;
    }
    return tilted;
}

}  // namespace

std::string_view to_string(InitialMode mode)
{
    switch (mode) {
    case InitialMode::uniform: return "uniform";
    case InitialMode::explicit_state: return "explicit";
    case InitialMode::class_profile: return "class-profile";
    }
    return "uniform";
}

InitialMode parse_initial_mode(std::string_view text)
{
    if (text == "uniform") {
        return InitialMode::uniform;
    }
    if (text == "explicit") {
        return InitialMode::explicit_state;
    }
    if (text == "class-profile" || text == "class_profile") {
        return InitialMode::class_profile;
    }
    fail(ErrorCategory::invalid_config, "unknown initial condition mode '" + std::string(text) + "'");
}

PopulationState make_initial_state(const InitialConditionSpec& ic, const ModelConfig& config)
{
    const int n = config.classes();
    const int m = config.sectors();
    PopulationState x(n, m);

    switch (ic.mode) {
    case InitialMode::uniform:
        for (int a = 0; a < m; ++a) {
            x.values().col(a).setConstant(config.sector_shares[static_cast<std::size_t>(a)] / n);
        }
        break;
    case InitialMode::explicit_state: {
        require(ic.state.has_value(), ErrorCategory::invalid_config, "explicit initial condition without a state");
        require(ic.state->rows() == n && ic.state->cols() == m, ErrorCategory::invalid_config,
                "explicit initial state must be n x m");
        require(ic.state->allFinite() && ic.state->minCoeff() >= 0.0, ErrorCategory::invalid_config,
                "explicit initial state must be non-negative");
        std::ostringstream os;
        os.precision(17);
        os << "explicit initial state must sum to 1 (sum = " << ic.state->sum() << ")";
        require(std::abs(ic.state->sum() - 1.0) <= 1e-12, ErrorCategory::invalid_config, os.str());
        x.values() = *ic.state;
        break;
    }
    case InitialMode::class_profile: {
        require(static_cast<int>(ic.profile.size()) == n, ErrorCategory::invalid_config,
                "class profile must have one weight per class");
        double mass = 0.0;
        for (double u : ic.profile) {
            require(std::isfinite(u) && u >= 0.0, ErrorCategory::invalid_config,
                    "class profile weights must be non-negative");
            mass += u;
        }
        require(mass > 0.0, ErrorCategory::invalid_config, "class profile has zero total weight");
        std::vector<double> u(ic.profile);
        for (double& v : u) {
            v /= mass;
        }
        if (ic.target_mu) {
            u = tilt_to_mean(u, config.incomes, *ic.target_mu);
        }
        for (int j = 0; j < n; ++j) {
            for (int a = 0; a < m; ++a) {
                x(j, a) = u[static_cast<std::size_t>(j)] * config.sector_shares[static_cast<std::size_t>(a)];
            }
        }
        break;
    }
    }
    return x;
}

ScenarioResult run_scenario(const ModelConfig& config, const InitialConditionSpec& ic,
                            const IntegrationOptions& options, const TrajectoryObserver* observer)
{
    const auto tables = build_tables(config);
    const auto x0 = make_initial_state(ic, config);
    ScenarioResult result;
    result.stationary = evolve_to_stationary(x0, tables, options, observer);
    result.metrics = metrics_report(result.stationary.state, config);
    return result;
}

std::vector<double> table_sweep_levels()
{
    return {0.05, 0.10, 0.15, 0.20, 0.25, 0.30, 0.40, 0.50};
}

std::vector<SweepRow> evasion_sweep(const ModelConfig& base, std::span<const double> etas,
                                    const InitialConditionSpec& ic, const IntegrationOptions& options,
                                    bool parallel)
{
    require_three_equal_sectors(base, "evasion sweep");
    std::vector<double> levels(etas.begin(), etas.end());
    for (double eta : levels) {
        std::ostringstream os;
        os << "evasion level " << eta << " outside [0, 0.5]";
        require(std::isfinite(eta) && eta >= 0.0 && eta <= 0.5, ErrorCategory::invalid_sweep_point, os.str());
    }
    std::sort(levels.begin(), levels.end());

    auto run_point = [&](double eta) {
        ModelConfig config = base;
        config.theta_ev = {1.0, 1.0 - eta, 1.0 - 2.0 * eta};
        const auto scenario = run_scenario(config, ic, options);
        SweepRow row;
        row.eta = eta;
        row.theta = {config.theta_ev[0], config.theta_ev[1], config.theta_ev[2]};
        row.income_gap = scenario.metrics.income_gap.value_or(std::nan(""));
        row.gini_total = scenario.metrics.gini_total;
        row.converged = scenario.stationary.converged;
        row.residual = scenario.stationary.residual;
        row.mu = scenario.metrics.mu_total;
        return row;
    };

    std::vector<SweepRow> rows;
    rows.reserve(levels.size());
    if (parallel) {
        std::vector<std::future<SweepRow>> pending;
        pending.reserve(levels.size());
        for (double eta : levels) {
            pending.push_back(std::async(std::launch::async, run_point, eta));
        }
        for (auto& f : pending) {
            rows.push_back(f.get());
        }
    } else {
        for (double eta : levels) {
            rows.push_back(run_point(eta));
        }
    }
    return rows;
}

QuadraticFit fit_quadratic_through_origin(std::span<const std::pair<double, double>> points)
{
    std::vector<double> distinct;
    double s2 = 0.0, s3 = 0.0, s4 = 0.0, d1 = 0.0, d2 = 0.0;
    for (const auto& [eta, d] : points) {
        require(std::isfinite(eta) && std::isfinite(d), ErrorCategory::underdetermined_fit,
                "fit points must be finite");
        if (eta != 0.0 && std::find(distinct.begin(), distinct.end(), eta) == distinct.end()) {
            distinct.push_back(eta);
        }
        const double e2 = eta * eta;
        s2 += e2;
        s3 += e2 * eta;
        s4 += e2 * e2;
        d1 += d * eta;
        d2 += d * e2;
    }
    require(distinct.size() >= 2, ErrorCategory::underdetermined_fit,
            "quadratic fit needs at least 2 distinct nonzero eta values");
    const double det = s4 * s2 - s3 * s3;
    require(std::abs(det) > 1e-14 * s4 * s2, ErrorCategory::underdetermined_fit, "normal matrix is singular");
    return {(d2 * s2 - d1 * s3) / det, (s4 * d1 - s3 * d2) / det};
}

ComplianceComparison compare_compliance_vs_evasion(const ModelConfig& config, const InitialConditionSpec& ic,
                                                   const IntegrationOptions& options)
{
    ModelConfig honest = config;
    std::fill(honest.theta_ev.begin(), honest.theta_ev.end(), 1.0);
    ComplianceComparison out;
    out.evasion = run_scenario(config, ic, options);
    out.compliance = run_scenario(honest, ic, options);
    out.delta = out.evasion.metrics.class_marginals - out.compliance.metrics.class_marginals;
    return out;
}

SpreadComparison spread_comparison(const ModelConfig& base, const InitialConditionSpec& ic,
                                   const IntegrationOptions& options)
{
    require_three_equal_sectors(base, "spread comparison");
    ModelConfig widespread = base;
    widespread.theta_ev = {1.0, 0.75, 0.75};
    ModelConfig concentrated = base;
    concentrated.theta_ev = {1.0, 1.0, 0.5};

    const auto w = run_scenario(widespread, ic, options);
    const auto c = run_scenario(concentrated, ic, options);
    SpreadComparison out;
    out.eta_widespread = total_evasion_level(widespread.sector_shares, widespread.theta_ev);
    out.eta_concentrated = total_evasion_level(concentrated.sector_shares, concentrated.theta_ev);
    out.gini_widespread = w.metrics.gini_total;
    out.gini_concentrated = c.metrics.gini_total;
    out.sector_gini_widespread = w.metrics.gini_per_sector;
    out.sector_gini_concentrated = c.metrics.gini_per_sector;
    return out;
}

}  // namespace taxkin
