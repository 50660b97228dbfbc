#include "taxkin/error.hpp"

namespace taxkin {

std::string_view to_string(ErrorCategory category)
{
    switch (category) {
    case ErrorCategory::invalid_config: return "invalid-config";
    case ErrorCategory::parse: return "parse";
    case ErrorCategory::singular_state: return "singular-state";
    case ErrorCategory::step_size_too_large: return "step-size-too-large";
    case ErrorCategory::conservation_violation: return "conservation-violation";
    case ErrorCategory::invalid_distribution: return "invalid-distribution";
    case ErrorCategory::invalid_sweep_point: return "invalid-sweep-point";
    case ErrorCategory::underdetermined_fit: return "underdetermined-fit";
    case ErrorCategory::contract_violation: return "contract-violation";
    case ErrorCategory::oracle_too_large: return "oracle-too-large";
    case ErrorCategory::io: return "io";
    }
    return "unknown";
}

Error::Error(ErrorCategory category, const std::string& message)
    : std::runtime_error(std::string(to_string(category)) + ": " + message), category_(category), detail_(message)
{
}

void fail(ErrorCategory category, const std::string& message)
{
    throw Error(category, message);
}

}  // namespace taxkin
