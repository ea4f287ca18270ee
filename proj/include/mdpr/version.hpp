#pragma once

namespace mdpr {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace mdpr
