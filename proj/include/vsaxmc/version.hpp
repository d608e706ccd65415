#pragma once

namespace vsaxmc {

inline constexpr const char* kVersion = "0.3.0";

}  // namespace vsaxmc
