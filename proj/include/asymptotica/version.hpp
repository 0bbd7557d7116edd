#pragma once

namespace asymptotica {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace asymptotica
