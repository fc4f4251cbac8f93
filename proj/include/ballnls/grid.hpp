#pragma once

#include <span>
#include <vector>

#include "ballnls/quadrature.hpp"
#include "ballnls/state.hpp"

namespace ballnls {

/// Modes 1..N sampled on the nodes of a composite Gauss-Legendre rule that
/// resolves quartic products (4N half-waves). Works with w(r) = r*u(r) =
/// sum a_n sin(n*pi*r), which is regular at r = 0.
class ModalGrid {
public:
  explicit ModalGrid(int N, std::size_t nodes_per_oscillation = QuadratureRule::kDefaultNodesPerOscillation);
  ModalGrid(int N, QuadratureRule rule);

  int N() const { return N_; }
  const QuadratureRule& rule() const { return rule_; }
  std::size_t size() const { return rule_.size(); }

  /// w(r_j) = r_j * u(r_j) at every node. A state with more than N modes is
  /// a ResolutionError; fewer modes are zero-padded.
  void synthesize(const RadialState& state, std::span<Complex> w) const;
  std::vector<Complex> synthesize(const RadialState& state) const;

  /// Coefficients <f, e_n> / <e_n, e_n> = 2 * int_0^1 (r f) sin(n pi r) dr
  /// from nodal values r_j * f(r_j).
  void project(std::span<const Complex> r_times_field, std::span<Complex> out) const;

  /// int_B |u|^4 dx by quadrature.
  double quartic_norm(const RadialState& state) const;

  /// G_n(a) = (1/2pi) int_B |u|^2 u e_n dx for n = 1..N by collocation.
  void nonlinear_coefficients(const RadialState& state, std::span<Complex> out) const;

  /// sin(n pi r_j), row n-1.
  double sine(int n, std::size_t j) const { return table_[static_cast<std::size_t>(n - 1) * rule_.size() + j]; }

private:
  int N_;
  QuadratureRule rule_;
  std::vector<double> table_;
  std::vector<double> inv_r2_;
};

}  // namespace ballnls
