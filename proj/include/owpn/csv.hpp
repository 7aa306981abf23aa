#pragma once

#include <cmath>
#include <cstdio>
#include <string>

namespace owpn::csv {

/// Round-trip (17 significant digit) formatting so rerunning a command with
/// identical inputs yields byte-identical CSV output.
inline std::string fmt17(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", value);
  return buf;
}

}  // namespace owpn::csv
