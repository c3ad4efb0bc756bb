#pragma once

namespace midnav {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace midnav
