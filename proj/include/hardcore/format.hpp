#pragma once

// Output helpers: every floating value leaves the library with 17 significant
// digits so CSV/JSON files round-trip exactly.

#include <cmath>
#include <complex>
#include <cstdio>
#include <string>

namespace hardcore {

inline std::string fmt17(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

/// JSON-safe double: non-finite values become null.
template <class Json>
Json json_number(double x) {
  if (!std::isfinite(x)) return Json(nullptr);
  return Json(x);
}

}  // namespace hardcore
