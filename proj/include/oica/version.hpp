#pragma once

namespace oica {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace oica
