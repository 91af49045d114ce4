#pragma once

#include <cstdio>
#include <string>

namespace memfun {

/// 17 significant digits: reads back to the same double.
inline std::string format_double(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

}  // namespace memfun
