#include "taxkin/dynamics.hpp"

#include "taxkin/error.hpp"

namespace taxkin {

RightHandSide::RightHandSide(const CoefficientTables& tables)
    : tables_(&tables),
      class_mass_(tables.classes),
      net_received_(tables.classes),
      tax_due_(tables.classes),
      payout_(tables.classes),
      tax_paid_(tables.classes),
      income_rate_(tables.classes)
{
}

void RightHandSide::operator()(const Eigen::MatrixXd& x, Eigen::MatrixXd& dxdt)
{
    const auto& t = *tables_;
    const int n = t.classes;
    const int m = t.sectors;
    const int last = n - 1;
    const double s = t.exchange_amount;
    const auto& p = t.payment;
    const auto& theta = t.theta;
    const auto& gap_inv = t.gap_inv;

    class_mass_ = x.rowwise().sum();
    tax_due_ = (theta.array() * x.array()).rowwise().sum();
    net_received_ = class_mass_ - tax_due_;
    const double total = class_mass_.sum();
    require(total != 0.0, ErrorCategory::singular_state, "total population is zero");

    // Counterparts in the top class never receive, those in the bottom class never pay.
    for (int h = 0; h < n; ++h) {
        double out = 0.0;
        double tax = 0.0;
        for (int k = 0; k < last; ++k) {
            out += p(h, k) * net_received_(k);
            tax += p(h, k) * tax_due_(k);
        }
        payout_(h) = s * out;
        tax_paid_(h) = s * tax;
    }
    for (int j = 0; j < n; ++j) {
        double in = 0.0;
        for (int k = 1; k < n; ++k) {
            in += p(k, j) * class_mass_(k);
        }
        income_rate_(j) = s * in;
    }

    const double revenue = class_mass_.dot(tax_paid_);
    const double per_capita = revenue / total;
    const double below_top = class_mass_.head(last).sum() / total;

    dxdt.resize(n, m);
    for (int a = 0; a < m; ++a) {
        for (int j = 0; j < n; ++j) {
            const double xj = x(j, a);
            double d = 0.0;
            if (j >= 1) {
                const double g = gap_inv(j - 1);
                const double xl = x(j - 1, a);
                d -= xj * (payout_(j) + below_top * tax_paid_(j)) * g;
                d += xl * ((1.0 - theta(j - 1, a)) * income_rate_(j - 1) + per_capita) * g;
            }
            if (j <= last - 1) {
                const double g = gap_inv(j);
                const double xu = x(j + 1, a);
                d += xu * (payout_(j + 1) + below_top * tax_paid_(j + 1)) * g;
                d -= xj * ((1.0 - theta(j, a)) * income_rate_(j) + per_capita) * g;
            }
            dxdt(j, a) = d;
        }
    }
}

Eigen::MatrixXd rhs(const PopulationState& x, const CoefficientTables& tables)
{
    require(x.classes() == tables.classes && x.sectors() == tables.sectors, ErrorCategory::contract_violation,
            "state shape does not match coefficient tables");
    require(x.values().allFinite(), ErrorCategory::contract_violation, "state has non-finite entries");
    RightHandSide f(tables);
    Eigen::MatrixXd out;
    f(x.values(), out);
    return out;
}

}  // namespace taxkin
