#include "ballnls/special.hpp"

#include <cmath>
#include <complex>
#include <limits>
#include <numbers>

namespace ballnls {

double sine_integral(double x) {
  if (x < 0.0) return -sine_integral(-x);
  if (x == 0.0) return 0.0;
  constexpr double eps = std::numeric_limits<double>::epsilon();
  if (x <= 2.0) {
    // Power series; terms alternate and decay quickly on [0, 2].
    double sum = 0.0;
    double fact = x;  // x^(2k+1)/(2k+1)!
    for (int k = 0; k < 40; ++k) {
      const double term = fact / (2.0 * k + 1.0);
      sum += (k % 2 == 0) ? term : -term;
      if (std::abs(term) < eps * std::abs(sum)) break;
      fact *= x * x / ((2.0 * k + 2.0) * (2.0 * k + 3.0));
    }
    return sum;
  }
  // Continued fraction for E1(ix), modified Lentz.
  const double tiny = 1e-300;
  std::complex<double> b(1.0, x);
  std::complex<double> c(1.0 / tiny, 0.0);
  std::complex<double> d = 1.0 / b;
  std::complex<double> h = d;
  for (int i = 2; i < 100000; ++i) {
    const double a = -static_cast<double>((i - 1) * (i - 1));
    b += 2.0;
    d = 1.0 / (a * d + b);
    c = b + a / c;
    const std::complex<double> del = c * d;
    h *= del;
    if (std::abs(del.real() - 1.0) + std::abs(del.imag()) < eps) break;
  }
  h *= std::complex<double>(std::cos(x), -std::sin(x));
  return 0.5 * std::numbers::pi + h.imag();
}

}  // namespace ballnls
