#pragma once

#include <cstdio>
#include <string>

namespace rcn {

/// Formats a double with 17 significant digits; round-trips IEEE doubles
/// exactly, which the checkpoint and CSV contracts depend on.
inline std::string format_g17(double value) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", value);
  return buf;
}

}  // namespace rcn
