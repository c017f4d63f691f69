#pragma once

namespace tfec {

inline constexpr const char* kVersion = "0.1.0";
inline constexpr int kContainerVersion = 1;

}  // namespace tfec
