#pragma once

namespace ser {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace ser
