#pragma once

namespace macroeval {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace macroeval
