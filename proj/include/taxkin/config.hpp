#pragma once

#include <string>
#include <vector>

namespace taxkin {

/// Parameters of the n x m income-exchange model with taxation and evasion.
///
/// Classes are indexed 0..n-1 internally; documentation and file formats use
/// 1-based indices. The tax schedule is either linear between `tau_min` and
/// `tau_max`, or the explicit `tax_rates` vector when that is non-empty.
struct ModelConfig {
    std::vector<double> incomes;        // r_j, strictly increasing, > 0
    double exchange_amount = 1.0;       // S
    double tau_min = 0.0;
    double tau_max = 0.0;
    std::vector<double> tax_rates;      // explicit schedule; overrides tau_min/tau_max
    std::vector<double> theta_ev;       // fraction of due taxes paid, per sector
    std::vector<double> sector_shares;  // w_alpha, sums to 1

    int classes() const { return static_cast<int>(incomes.size()); }
    int sectors() const { return static_cast<int>(theta_ev.size()); }
    bool explicit_tax_rates() const { return !tax_rates.empty(); }
};

/// Checks every configuration invariant and throws `Error(invalid_config)`
/// naming the first violated one. Returns non-fatal warnings (currently only
/// an exchange amount that is large relative to the smallest class gap).
std::vector<std::string> validate(const ModelConfig& config);

/// n = 9, m = 3, S = 1, r_j = 10 j, taxes 10%..45%, theta_ev = (1, 1/2, 1/4),
/// equal thirds.
ModelConfig reference_config();

/// r_j = scale * j + offset for j = 1..n.
std::vector<double> linear_incomes(int n, double scale, double offset = 0.0);

}  // namespace taxkin
