#pragma once

namespace ligme {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace ligme
