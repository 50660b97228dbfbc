#include "taxkin/metrics.hpp"

#include "taxkin/error.hpp"

#include <cmath>

namespace taxkin {

double gini(std::span<const double> weights, std::span<const double> incomes)
{
    require(weights.size() == incomes.size() && !weights.empty(), ErrorCategory::invalid_distribution,
            "weights and incomes must have equal, non-zero length");
    double total = 0.0;
    for (std::size_t i = 0; i < weights.size(); ++i) {
        require(std::isfinite(weights[i]) && weights[i] >= 0.0, ErrorCategory::invalid_distribution,
                "weights must be non-negative");
        require(std::isfinite(incomes[i]) && incomes[i] > 0.0, ErrorCategory::invalid_distribution,
                "incomes must be positive");
        total += weights[i];
    }
    require(total > 0.0, ErrorCategory::invalid_distribution, "total weight is zero");

    double mean = 0.0;
    double spread = 0.0;
    for (std::size_t i = 0; i < weights.size(); ++i) {
        const double wi = weights[i] / total;
        mean += wi * incomes[i];
        for (std::size_t j = 0; j < i; ++j) {
            spread += wi * (weights[j] / total) * std::abs(incomes[i] - incomes[j]);
        }
    }
    // spread holds each unordered pair once
    return spread / mean;
}

double gini(const Eigen::VectorXd& weights, const Eigen::VectorXd& incomes)
{
    return gini(std::span<const double>(weights.data(), static_cast<std::size_t>(weights.size())),
                std::span<const double>(incomes.data(), static_cast<std::size_t>(incomes.size())));
}

MetricsReport metrics_report(const PopulationState& x, const ModelConfig& config)
{
    const int n = config.classes();
    const int m = config.sectors();
    require(x.classes() == n && x.sectors() == m, ErrorCategory::contract_violation,
            "state shape does not match configuration");
    const Eigen::Map<const Eigen::VectorXd> r(config.incomes.data(), n);

    MetricsReport report;
    report.class_marginals = x.class_marginals();
    report.sector_marginals = x.sector_marginals();
    report.mu_total = r.dot(report.class_marginals);
    report.gini_total = gini(report.class_marginals, Eigen::VectorXd(r));

    report.sector_mean_income.resize(static_cast<std::size_t>(m));
    report.gini_per_sector.resize(static_cast<std::size_t>(m));
    for (int a = 0; a < m; ++a) {
        const double mass = report.sector_marginals(a);
        if (mass <= empty_sector_mass) {
            continue;
        }
        const Eigen::VectorXd column = x.values().col(a);
        report.sector_mean_income[static_cast<std::size_t>(a)] = r.dot(column) / mass;
        report.gini_per_sector[static_cast<std::size_t>(a)] = gini(column, Eigen::VectorXd(r));
    }

    const auto& honest = report.sector_mean_income.front();
    const auto& worst = report.sector_mean_income.back();
    if (honest && worst) {
        report.income_gap = (*worst - *honest) / *honest;
    }
    return report;
}

double total_evasion_level(std::span<const double> shares, std::span<const double> theta_ev)
{
    require(shares.size() == theta_ev.size(), ErrorCategory::invalid_config,
            "sector_shares and theta_ev lengths differ");
    double eta = 0.0;
    for (std::size_t a = 0; a < shares.size(); ++a) {
        eta += shares[a] * (1.0 - theta_ev[a]);
    }
    return eta;
}

}  // namespace taxkin
