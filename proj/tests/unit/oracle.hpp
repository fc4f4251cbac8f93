#pragma once

// Test-side reference integrators, written without the library's quadrature.

#include <cmath>
#include <functional>
#include <numbers>

namespace oracle {

/// Composite Simpson on [a, b] with `intervals` (even) subintervals.
inline double simpson(const std::function<double(double)>& f, double a, double b, int intervals) {
  const double h = (b - a) / intervals;
  double acc = f(a) + f(b);
  for (int i = 1; i < intervals; ++i) acc += (i % 2 ? 4.0 : 2.0) * f(a + i * h);
  return acc * h / 3.0;
}

/// e_n(r) with its r = 0 limit.
inline double e(int n, double r) { return r == 0.0 ? n * std::numbers::pi : std::sin(n * std::numbers::pi * r) / r; }

/// int_B e_a e_b e_c e_d dx by Simpson on the radial integrand.
inline double correlation(int a, int b, int c, int d, int intervals = 20000) {
  return 4.0 * std::numbers::pi *
         simpson([&](double r) { return e(a, r) * e(b, r) * e(c, r) * e(d, r) * r * r; }, 0.0, 1.0, intervals);
}

}  // namespace oracle
