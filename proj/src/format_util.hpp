#pragma once

#include <cstdio>
#include <string>

namespace mixlearn::detail {

// Round-trip formatting for CSV cells; %.17g reproduces the double exactly
// and never depends on locale.
inline std::string fmt_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

// Short form for display strings such as check names.
inline std::string fmt_short(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%g", x);
  return buf;
}

}  // namespace mixlearn::detail
