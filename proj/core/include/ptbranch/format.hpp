#pragma once

#include <cstdio>
#include <string>

namespace ptbranch {

/// Full-precision scientific notation; round-trips every double exactly.
/// Negative zero prints as zero.
inline std::string sci(double value) {
  if (value == 0.0) value = 0.0;
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17e", value);
  return buf;
}

}  // namespace ptbranch
