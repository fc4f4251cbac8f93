#pragma once

#include <complex>
#include <vector>

namespace ballnls {

using Complex = std::complex<double>;

/// u = sum_{n=1..N} a_n e_n at model time `time`; coeffs[n-1] holds a_n.
struct RadialState {
  std::vector<Complex> coeffs;
  double time = 0.0;

  RadialState() = default;
  explicit RadialState(int N, double t = 0.0) : coeffs(static_cast<std::size_t>(N)), time(t) {}
  RadialState(std::vector<Complex> c, double t) : coeffs(std::move(c)), time(t) {}

  int N() const { return static_cast<int>(coeffs.size()); }
  Complex& operator[](int n) { return coeffs[static_cast<std::size_t>(n - 1)]; }
  const Complex& operator[](int n) const { return coeffs[static_cast<std::size_t>(n - 1)]; }
  bool finite() const;
};

}  // namespace ballnls
