#pragma once

#include <string_view>

namespace taxkin {

inline constexpr std::string_view engine_version = "0.3.0";

}  // namespace taxkin
