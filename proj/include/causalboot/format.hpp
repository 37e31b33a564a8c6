#pragma once

#include <cstdio>
#include <string>

namespace causalboot {

// %.6g rendering for every floating-point field written to CSV or JSON.
// A fixed schema plus a fixed format keeps emitted reports byte-stable,
// which the reproducibility checks compare directly.
inline std::string fmt_g6(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

}  // namespace causalboot
