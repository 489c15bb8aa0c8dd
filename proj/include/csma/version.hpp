#pragma once

namespace csma {

inline constexpr const char kVersion[] = "0.1.0";

}  // namespace csma
