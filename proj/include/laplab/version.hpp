#pragma once

namespace laplab {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace laplab
