#pragma once

#include <cstddef>
#include <vector>

namespace ballnls {

/// Gauss-Legendre nodes/weights on [-1, 1].
struct GaussLegendre {
  std::vector<double> nodes;
  std::vector<double> weights;
};

GaussLegendre gauss_legendre(std::size_t points);

/// Composite Gauss-Legendre rule on the radial interval (0, 1].
///
/// `order` counts equal-width panels; every panel carries the same
/// `points_per_panel`-point Gauss-Legendre template. Radial integrals over the
/// ball are evaluated as 4*pi * sum_j weights[j] * f(nodes[j]) * nodes[j]^2.
class QuadratureRule {
public:
  /// Minimum nodes per oscillation of the highest frequency in an integrand.
  static constexpr std::size_t kMinNodesPerOscillation = 8;
  static constexpr std::size_t kDefaultNodesPerOscillation = 10;

  QuadratureRule(std::size_t panels, std::size_t points_per_panel);

  /// Rule resolving integrands whose fastest factor is sin(k*pi*r), i.e. k
  /// half-waves on [0, 1], with `nodes_per_oscillation` nodes per period.
  static QuadratureRule for_half_waves(std::size_t k,
                                       std::size_t nodes_per_oscillation = kDefaultNodesPerOscillation);

  const std::vector<double>& nodes() const { return nodes_; }
  const std::vector<double>& weights() const { return weights_; }
  std::size_t order() const { return panels_; }
  std::size_t points_per_panel() const { return points_; }
  std::size_t size() const { return nodes_.size(); }

  /// Highest k such that sin(k*pi*r)-type integrands are resolved with at
  /// least kMinNodesPerOscillation nodes per period.
  std::size_t resolved_half_waves() const;

  /// Integrates f over [a, b] with the per-panel template rescaled to that
  /// interval (no compositing).
  template <class F>
  double integrate_on(double a, double b, F&& f) const {
    const double half = 0.5 * (b - a), mid = 0.5 * (a + b);
    double acc = 0.0;
    for (std::size_t i = 0; i < tmpl_.nodes.size(); ++i) {
      acc += tmpl_.weights[i] * f(mid + half * tmpl_.nodes[i]);
    }
    return acc * half;
  }

private:
  std::size_t panels_;
  std::size_t points_;
  GaussLegendre tmpl_;
  std::vector<double> nodes_;
  std::vector<double> weights_;
};

}  // namespace ballnls
