#pragma once

namespace mmw {

inline constexpr const char* kToolName = "witness";
inline constexpr const char* kVersion = "0.1.0";

}  // namespace mmw
