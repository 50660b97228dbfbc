#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace taxkin {

enum class ErrorCategory {
    invalid_config,
    parse,
    singular_state,
    step_size_too_large,
    conservation_violation,
    invalid_distribution,
    invalid_sweep_point,
    underdetermined_fit,
    contract_violation,
    oracle_too_large,
    io,
};

std::string_view to_string(ErrorCategory category);

/// Base exception for every failure raised by the engine.
class Error : public std::runtime_error {
public:
    Error(ErrorCategory category, const std::string& message);

    ErrorCategory category() const noexcept { return category_; }
    /// The message without the category prefix.
    const std::string& detail() const noexcept { return detail_; }

private:
    ErrorCategory category_;
    std::string detail_;
};

[[noreturn]] void fail(ErrorCategory category, const std::string& message);

inline void require(bool condition, ErrorCategory category, const std::string& message)
{
    if (!condition) {
        fail(category, message);
    }
}

}  // namespace taxkin
