#include "taxkin/oracle.hpp"

#include "taxkin/error.hpp"

#include <string>

namespace taxkin {

InteractionVariation interaction_variation(Group payer, Group receiver, const CoefficientTables& tables)
{
    const double rate = tables.payment(payer.cls, receiver.cls) * tables.exchange_amount
                        * (1.0 - tables.theta(receiver.cls, receiver.sector));
    InteractionVariation v;
    if (rate == 0.0) {
        return v;
    }
    const auto& r = tables.incomes;
    require(payer.cls >= 1 && receiver.cls + 1 < tables.classes, ErrorCategory::contract_violation,
            "nonzero payment at a boundary class");
    v.payer_down = rate / (r(payer.cls) - r(payer.cls - 1));
    v.payer_stay = -v.payer_down;
    v.receiver_up = rate / (r(receiver.cls + 1) - r(receiver.cls));
    v.receiver_stay = -v.receiver_up;
    return v;
}

double decomposed_coefficient(Group target, Group migrant, Group counterpart, const CoefficientTables& tables)
{
    const bool same_sector = target.sector == migrant.sector;
    double c = (same_sector && target.cls == migrant.cls) ? 1.0 : 0.0;
    if (!same_sector) {
        return c;
    }
    const auto as_payer = interaction_variation(migrant, counterpart, tables);
    if (target.cls == migrant.cls - 1) {
        c += as_payer.payer_down;
    } else if (target.cls == migrant.cls) {
        c += as_payer.payer_stay;
    }
    const auto as_receiver = interaction_variation(counterpart, migrant, tables);
    if (target.cls == migrant.cls + 1) {
        c += as_receiver.receiver_up;
    } else if (target.cls == migrant.cls) {
        c += as_receiver.receiver_stay;
    }
    return c;
}

Eigen::MatrixXd rhs_naive_oracle(const PopulationState& x, const CoefficientTables& tables)
{
    const int n = tables.classes;
    const int m = tables.sectors;
    require(n * m <= oracle_max_groups, ErrorCategory::oracle_too_large,
            "naive oracle limited to n*m <= " + std::to_string(oracle_max_groups) + ", got "
                + std::to_string(n * m));
    require(x.classes() == n && x.sectors() == m, ErrorCategory::contract_violation,
            "state shape does not match coefficient tables");

    Eigen::MatrixXd out(n, m);
    const double total = x.total();
    for (int j = 0; j < n; ++j) {
        for (int a = 0; a < m; ++a) {
            const Group target{j, a};
            double sum = 0.0;
            for (int h = 0; h < n; ++h) {
                for (int b = 0; b < m; ++b) {
                    const Group migrant{h, b};
                    for (int k = 0; k < n; ++k) {
                        for (int g = 0; g < m; ++g) {
                            const Group counterpart{k, g};
                            const double c = decomposed_coefficient(target, migrant, counterpart, tables);
                            const double t = redistribution_term(target, migrant, counterpart, x, tables);
                            sum += (c + t) * x(h, b) * x(k, g);
                        }
                    }
                }
            }
            out(j, a) = sum - x(j, a) * total;
        }
    }
    return out;
}

}  // namespace taxkin
