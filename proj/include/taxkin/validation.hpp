#pragma once

#include "taxkin/config.hpp"
#include "taxkin/integrator.hpp"

#include <string>
#include <vector>

namespace taxkin {

struct CheckResult {
    std::string name;
    bool passed = false;
    std::string detail;
};

/// Deterministic, non-negative probe state number `index` (sums to 1).
PopulationState probe_state(int classes, int sectors, int index);

/// Runs the model's structural invariants on `config`: payment and tax table
/// ranges, C column sums and range, the a + b decomposition, T sums, rhs
/// conservation identities, fast-vs-brute-force rhs agreement, and
/// conservation along a short trajectory. Uses no random numbers.
std::vector<CheckResult> run_invariant_suite(const ModelConfig& config, const IntegrationOptions& options);

}  // namespace taxkin
