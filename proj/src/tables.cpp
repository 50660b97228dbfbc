#include "taxkin/tables.hpp"

#include "taxkin/error.hpp"

#include <algorithm>
#include <string>

namespace taxkin {

namespace {

void check_group(Group g, const CoefficientTables& tables, const char* role)
{
    require(g.cls >= 0 && g.cls < tables.classes && g.sector >= 0 && g.sector < tables.sectors,
            ErrorCategory::contract_violation,
            std::string(role) + " group index out of range: (" + std::to_string(g.cls + 1) + ", "
                + std::to_string(g.sector + 1) + ")");
}

}  // namespace

Eigen::VectorXd build_tax_rates(int classes, double tau_min, double tau_max)
{
    require(classes >= 2, ErrorCategory::invalid_config, "tax schedule needs at least 2 classes");
    Eigen::VectorXd tau(classes);
    for (int j = 0; j < classes; ++j) {
        tau(j) = tau_min + static_cast<double>(j) / (classes - 1) * (tau_max - tau_min);
    }
    return tau;
}

Eigen::VectorXd resolve_tax_rates(const ModelConfig& config)
{
    if (config.explicit_tax_rates()) {
        return Eigen::Map<const Eigen::VectorXd>(config.tax_rates.data(),
                                                 static_cast<Eigen::Index>(config.tax_rates.size()));
    }
    return build_tax_rates(config.classes(), config.tau_min, config.tau_max);
}

Eigen::MatrixXd build_payment_matrix(std::span<const double> incomes)
{
    const auto n = static_cast<Eigen::Index>(incomes.size());
    require(n >= 2, ErrorCategory::invalid_config, "payment matrix needs at least 2 classes");
    const double r_top = incomes[static_cast<std::size_t>(n - 1)];
    auto r = [&](Eigen::Index i) { return incomes[static_cast<std::size_t>(i)]; };

    Eigen::MatrixXd p(n, n);
    for (Eigen::Index h = 0; h < n; ++h) {
        for (Eigen::Index k = 0; k < n; ++k) {
            p(h, k) = std::min(r(h), r(k)) / (4.0 * r_top);
        }
    }
    for (Eigen::Index j = 1; j + 1 < n; ++j) {
        p(j, j) = r(j) / (2.0 * r_top);
    }
    for (Eigen::Index h = 1; h < n; ++h) {
        p(h, 0) = r(0) / (2.0 * r_top);
    }
    // p(n, 1) is written by both this rule and the previous one with the same value.
    for (Eigen::Index k = 0; k + 1 < n; ++k) {
        p(n - 1, k) = r(k) / (2.0 * r_top);
    }
    p.row(0).setZero();
    p.col(n - 1).setZero();
    return p;
}

Eigen::MatrixXd build_effective_tax_table(const Eigen::VectorXd& tax_rates, std::span<const double> theta_ev)
{
    const auto m = static_cast<Eigen::Index>(theta_ev.size());
    Eigen::MatrixXd theta(tax_rates.size(), m);
    for (Eigen::Index a = 0; a < m; ++a) {
        theta.col(a) = theta_ev[static_cast<std::size_t>(a)] * tax_rates;
    }
    return theta;
}

CoefficientTables build_tables(const ModelConfig& config)
{
    validate(config);
    CoefficientTables t;
    t.classes = config.classes();
    t.sectors = config.sectors();
    t.exchange_amount = config.exchange_amount;
    t.incomes = Eigen::Map<const Eigen::VectorXd>(config.incomes.data(), t.classes);
    t.tax_rates = resolve_tax_rates(config);
    t.payment = build_payment_matrix(config.incomes);
    t.theta = build_effective_tax_table(t.tax_rates, config.theta_ev);
    t.gap_inv.resize(t.classes - 1);
    for (int j = 0; j + 1 < t.classes; ++j) {
        t.gap_inv(j) = 1.0 / (t.incomes(j + 1) - t.incomes(j));
    }
    return t;
}

double direct_coefficient(Group target, Group migrant, Group counterpart, const CoefficientTables& tables)
{
    check_group(target, tables, "target");
    check_group(migrant, tables, "migrant");
    check_group(counterpart, tables, "counterpart");
    if (migrant.sector != target.sector) {
        return 0.0;
    }

    const int j = target.cls;
    const int h = migrant.cls;
    const int k = counterpart.cls;
    const int last = tables.classes - 1;
    const int alpha = target.sector;
    const int gamma = counterpart.sector;
    const double s = tables.exchange_amount;
    const auto& p = tables.payment;
    const auto& theta = tables.theta;

    if (h == j + 1) {
        // payer drops from j+1 to j
        if (j > last - 1 || k > last - 1) {
            return 0.0;
        }
        return p(j + 1, k) * s * (1.0 - theta(k, gamma)) * tables.gap_inv(j);
    }
    if (h == j) {
        double c = 1.0;
        if (j <= last - 1 && k >= 1) {
            c -= p(k, j) * s * (1.0 - theta(j, alpha)) * tables.gap_inv(j);
        }
        if (j >= 1 && k <= last - 1) {
            c -= p(j, k) * s * (1.0 - theta(k, gamma)) * tables.gap_inv(j - 1);
        }
        return c;
    }
    if (h == j - 1) {
        // receiver rises from j-1 to j
        if (j < 1 || k < 1) {
            return 0.0;
        }
        return p(k, j - 1) * s * (1.0 - theta(j - 1, alpha)) * tables.gap_inv(j - 1);
    }
    return 0.0;
}

double redistribution_term(Group target, Group migrant, Group counterpart, const PopulationState& x,
                           const CoefficientTables& tables)
{
    check_group(target, tables, "target");
    check_group(migrant, tables, "migrant");
    check_group(counterpart, tables, "counterpart");
    require(x.classes() == tables.classes && x.sectors() == tables.sectors, ErrorCategory::contract_violation,
            "state shape does not match coefficient tables");

    const int j = target.cls;
    const int h = migrant.cls;
    const int k = counterpart.cls;
    const int last = tables.classes - 1;
    const int alpha = target.sector;

    const double paid = tables.payment(h, k);
    if (paid == 0.0) {
        return 0.0;
    }
    const double total = x.total();
    require(total != 0.0, ErrorCategory::singular_state, "total population is zero");
    const double tax = paid * tables.exchange_amount * tables.theta(k, counterpart.sector);

    // uniform redistribution over everyone outside the top class
    double received = 0.0;
    if (j >= 1) {
        received += x(j - 1, alpha) * tables.gap_inv(j - 1);
    }
    if (j <= last - 1) {
        received -= x(j, alpha) * tables.gap_inv(j);
    }
    received /= total;

    // the payer's own descent for the collected tax
    double payer = 0.0;
    if (migrant.sector == alpha) {
        if (h == j + 1 && j + 1 <= last) {
            payer += 1.0 / (tables.incomes(h) - tables.incomes(j));
        }
        if (h == j && j >= 1) {
            payer -= 1.0 / (tables.incomes(h) - tables.incomes(j - 1));
        }
    }
    const double below_top = x.values().topRows(last).sum();
    payer *= below_top / total;

    return tax * (received + payer);
}

}  // namespace taxkin
