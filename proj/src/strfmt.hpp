#pragma once

#include <cstdio>
#include <string>

namespace laplab::detail {

// snprintf into a std::string; enough for error messages and CSV cells
template <class... Args>
std::string strf(const char* fmt, Args... args) {
  char buf[512];
  std::snprintf(buf, sizeof(buf), fmt, args...);
  return std::string(buf);
}

}  // namespace laplab::detail
