#include "taxkin/config.hpp"

#include "taxkin/error.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace taxkin {

namespace {

std::string describe(const char* what, std::size_t index, double value)
{
    std::ostringstream os;
    os.precision(17);
    os << what << " (index " << index + 1 << ", value " << value << ")";
    return os.str();
}

void check_fraction_range(const std::vector<double>& values, const char* name)
{
    for (std::size_t i = 0; i < values.size(); ++i) {
        require(std::isfinite(values[i]) && values[i] >= 0.0 && values[i] <= 1.0,
                ErrorCategory::invalid_config,
                describe((std::string(name) + " must lie in [0,1]").c_str(), i, values[i]));
    }
}

}  // namespace

std::vector<std::string> validate(const ModelConfig& config)
{
    const auto n = config.incomes.size();
    const auto m = config.theta_ev.size();
    require(n >= 2, ErrorCategory::invalid_config, "need at least 2 income classes");
    require(m >= 1, ErrorCategory::invalid_config, "need at least 1 evasion sector");
    require(config.sector_shares.size() == m, ErrorCategory::invalid_config,
            "sector_shares length must equal the number of sectors");

    for (std::size_t j = 0; j < n; ++j) {
        require(std::isfinite(config.incomes[j]) && config.incomes[j] > 0.0,
                ErrorCategory::invalid_config, describe("incomes must be positive", j, config.incomes[j]));
        if (j > 0) {
            require(config.incomes[j] > config.incomes[j - 1], ErrorCategory::invalid_config,
                    describe("incomes must be strictly increasing", j, config.incomes[j]));
        }
    }

    double min_gap = config.incomes[1] - config.incomes[0];
    for (std::size_t j = 1; j + 1 < n; ++j) {
        min_gap = std::min(min_gap, config.incomes[j + 1] - config.incomes[j]);
    }
    const double s = config.exchange_amount;
    require(std::isfinite(s) && s > 0.0, ErrorCategory::invalid_config, "exchange amount S must be positive");
    {
        std::ostringstream os;
        os << "exchange amount S = " << s << " must be smaller than the minimal class gap " << min_gap;
        require(s < min_gap, ErrorCategory::invalid_config, os.str());
    }

    if (config.explicit_tax_rates()) {
        require(config.tax_rates.size() == n, ErrorCategory::invalid_config,
                "explicit tax_rates length must equal the number of classes");
        check_fraction_range(config.tax_rates, "tax rate");
    } else {
        require(std::isfinite(config.tau_min) && std::isfinite(config.tau_max) && config.tau_min >= 0.0
                    && config.tau_min <= config.tau_max && config.tau_max <= 1.0,
                ErrorCategory::invalid_config, "tax schedule requires 0 <= tau_min <= tau_max <= 1");
    }

    check_fraction_range(config.theta_ev, "theta_ev");
    for (std::size_t a = 1; a < m; ++a) {
        require(config.theta_ev[a] <= config.theta_ev[a - 1], ErrorCategory::invalid_config,
                describe("theta_ev must be non-increasing across sectors", a, config.theta_ev[a]));
    }

    double share_sum = 0.0;
    for (std::size_t a = 0; a < m; ++a) {
        require(std::isfinite(config.sector_shares[a]) && config.sector_shares[a] >= 0.0,
                ErrorCategory::invalid_config,
                describe("sector share must be non-negative", a, config.sector_shares[a]));
        share_sum += config.sector_shares[a];
    }
    {
        std::ostringstream os;
        os.precision(17);
        os << "sector shares must sum to 1 (sum = " << share_sum << ")";
        require(std::abs(share_sum - 1.0) <= 1e-12, ErrorCategory::invalid_config, os.str());
    }

    std::vector<std::string> warnings;
    if (s > 0.2 * min_gap) {
        std::ostringstream os;
        os << "exchange amount S = " << s << " exceeds 0.2 x minimal class gap (" << min_gap
           << "); coefficients may leave [0,1]";
        warnings.push_back(os.str());
    }
    return warnings;
}

std::vector<double> linear_incomes(int n, double scale, double offset)
{
    std::vector<double> r(static_cast<std::size_t>(std::max(n, 0)));
    for (int j = 0; j < n; ++j) {
        r[static_cast<std::size_t>(j)] = scale * (j + 1) + offset;
    }
    return r;
}

ModelConfig reference_config()
{
    ModelConfig config;
    config.incomes = linear_incomes(9, 10.0);
    config.exchange_amount = 1.0;
    config.tau_min = 0.10;
    config.tau_max = 0.45;
    config.theta_ev = {1.0, 0.5, 0.25};
    config.sector_shares = {1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0};
    return config;
}

}  // namespace taxkin
