#pragma once

namespace vrdrelex {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace vrdrelex
