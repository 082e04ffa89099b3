#pragma once

#include <cstdint>
#include <string_view>

namespace gridtraffic {

/// CO follows the right-hand rule, DE ignores it.
enum class DriverType : std::uint8_t { co, de };

inline std::string_view to_string(DriverType t) { return t == DriverType::co ? "CO" : "DE"; }

}  // namespace gridtraffic
