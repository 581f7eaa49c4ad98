#pragma once

namespace i2a {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace i2a
