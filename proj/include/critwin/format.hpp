#pragma once

#include <cmath>
#include <cstdio>
#include <string>

namespace critwin {

// 17 significant digits round-trips every double. Non-finite values become an
// empty field.
inline std::string format_double(double x) {
  if (!std::isfinite(x)) return {};
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

}  // namespace critwin
