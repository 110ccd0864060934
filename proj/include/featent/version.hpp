#pragma once

namespace featent {

inline constexpr const char* kToolName = "featent";
inline constexpr const char* kVersion = "0.1.0";

}  // namespace featent
