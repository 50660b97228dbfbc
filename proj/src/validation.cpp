#include "taxkin/validation.hpp"

#include "taxkin/dynamics.hpp"
#include "taxkin/error.hpp"
#include "taxkin/oracle.hpp"
#include "taxkin/tables.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace taxkin {

namespace {

constexpr int probe_count = 8;

template <typename F>
void for_each_pair(int n, int m, F&& f)
{
    for (int h = 0; h < n; ++h) {
        for (int b = 0; b < m; ++b) {
            for (int k = 0; k < n; ++k) {
                for (int g = 0; g < m; ++g) {
                    f(Group{h, b}, Group{k, g});
                }
            }
        }
    }
}

std::string fmt(const char* label, double value)
{
    std::ostringstream os;
    os << label << " = " << value;
    return os.str();
}

}  // namespace

PopulationState probe_state(int classes, int sectors, int index)
{
    PopulationState x(classes, sectors);
    if (index == 0) {
        x.values().setConstant(1.0 / (classes * sectors));
        return x;
    }
    for (int j = 0; j < classes; ++j) {
        for (int a = 0; a < sectors; ++a) {
            x(j, a) = 1.0 + 0.9 * std::sin(1.7 * (j + 1) + 2.3 * (a + 1) + 0.61 * index);
        }
    }
    x.values() /= x.total();
    return x;
}

std::vector<CheckResult> run_invariant_suite(const ModelConfig& config, const IntegrationOptions& options)
{
    std::vector<CheckResult> out;
    const auto tables = build_tables(config);
    const int n = tables.classes;
    const int m = tables.sectors;
    const auto& p = tables.payment;

    {
        double worst_pair = 0.0;
        bool in_range = true;
        for (int h = 0; h < n; ++h) {
            for (int k = 0; k < n; ++k) {
                in_range = in_range && p(h, k) >= 0.0 && p(h, k) <= 1.0;
                worst_pair = std::max(worst_pair, p(h, k) + p(k, h));
            }
        }
        const bool zeros = p.row(0).isZero(0.0) && p.col(n - 1).isZero(0.0);
        out.push_back({"payment probabilities", in_range && zeros && worst_pair <= 1.0,
                       fmt("max p_hk + p_kh", worst_pair)});
    }
    {
        const double lo = tables.theta.minCoeff();
        const double hi = tables.theta.maxCoeff();
        out.push_back({"effective tax range", lo >= 0.0 && hi <= 1.0, fmt("max theta", hi)});
    }
    {
        double worst_sum = 0.0;
        double worst_split = 0.0;
        int out_of_range = 0;
        std::string first_violation;
        for_each_pair(n, m, [&](Group migrant, Group counterpart) {
            double sum = 0.0;
            for (int j = 0; j < n; ++j) {
                for (int a = 0; a < m; ++a) {
                    const Group target{j, a};
                    const double c = direct_coefficient(target, migrant, counterpart, tables);
                    sum += c;
                    if (c < 0.0 || c > 1.0) {
                        if (out_of_range++ == 0) {
                            std::ostringstream os;
                            os << "C^(" << j + 1 << "," << a + 1 << ")_(" << migrant.cls + 1 << ","
                               << migrant.sector + 1 << ");(" << counterpart.cls + 1 << ","
                               << counterpart.sector + 1 << ") = " << c;
                            first_violation = os.str();
                        }
                    }
                    worst_split = std::max(
                        worst_split, std::abs(c - decomposed_coefficient(target, migrant, counterpart, tables)));
                }
            }
            worst_sum = std::max(worst_sum, std::abs(sum - 1.0));
        });
        out.push_back({"C sums to one", worst_sum <= 1e-12, fmt("max |sum C - 1|", worst_sum)});
        out.push_back({"C within [0,1]", out_of_range == 0,
                       out_of_range == 0 ? "all entries in range"
                                         : std::to_string(out_of_range) + " violations, first " + first_violation});
        out.push_back({"C equals a + b", worst_split <= 1e-14, fmt("max |C - (a + b)|", worst_split)});
    }
    {
        double worst = 0.0;
        for_each_pair(n, m, [&](Group payer, Group receiver) {
            const auto v = interaction_variation(payer, receiver, tables);
            worst = std::max(worst, std::abs(v.payer_down + v.payer_stay + v.receiver_up + v.receiver_stay));
        });
        out.push_back({"b coefficients cancel", worst <= 1e-15, fmt("max |sum b|", worst)});
    }

    double worst_t = 0.0;
    double worst_mass = 0.0;
    double worst_money = 0.0;
    double worst_oracle = 0.0;
    const bool oracle_ok = n * m <= oracle_max_groups;
    for (int s = 0; s < probe_count; ++s) {
        const auto x = probe_state(n, m, s);
        for_each_pair(n, m, [&](Group migrant, Group counterpart) {
            double sum = 0.0;
            for (int j = 0; j < n; ++j) {
                for (int a = 0; a < m; ++a) {
                    sum += redistribution_term({j, a}, migrant, counterpart, x, tables);
                }
            }
            worst_t = std::max(worst_t, std::abs(sum));
        });
        const auto f = rhs(x, tables);
        worst_mass = std::max(worst_mass, std::abs(f.sum()));
        worst_money = std::max(worst_money, std::abs(tables.incomes.dot(f.rowwise().sum())));
        if (oracle_ok) {
            const auto g = rhs_naive_oracle(x, tables);
            const double scale = std::max(g.cwiseAbs().maxCoeff(), 1e-300);
            worst_oracle = std::max(worst_oracle, (f - g).cwiseAbs().maxCoeff() / scale);
        }
    }
    out.push_back({"T sums to zero", worst_t <= 1e-12, fmt("max |sum T|", worst_t)});
    out.push_back({"rhs conserves population", worst_mass <= 1e-10, fmt("max |sum dx/dt|", worst_mass)});
    out.push_back({"rhs conserves income", worst_money <= 1e-10, fmt("max |sum r dx/dt|", worst_money)});
    if (oracle_ok) {
        out.push_back({"rhs matches brute force", worst_oracle <= 1e-12, fmt("max relative difference", worst_oracle)});
    } else {
        out.push_back({"rhs matches brute force", true, "skipped: n*m above oracle limit"});
    }

    {
        IntegrationOptions short_run = options;
        short_run.max_time = std::min(options.max_time, 1000.0);
        short_run.stationarity_tol = std::min(options.stationarity_tol, 1e-300);
        try {
            const auto result = evolve_to_stationary(probe_state(n, m, 0), tables, short_run);
            std::ostringstream os;
            os << "max |sum x - 1| = " << result.max_mass_drift << ", max |mu - mu0| = " << result.max_mu_drift
               << " over t <= " << result.final_time;
            out.push_back({"trajectory conservation", true, os.str()});
        } catch (const Error& e) {
            out.push_back({"trajectory conservation", false, e.what()});
        }
    }
    return out;
}

}  // namespace taxkin
