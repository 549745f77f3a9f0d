#pragma once

#include <cstdio>
#include <string>

namespace varimhd {

/// Fixed 12-significant-digit decimal used by every file output.
inline std::string format_number(double v) {
  if (v == 0.0) v = 0.0;  // drop the sign of negative zero
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

}  // namespace varimhd
