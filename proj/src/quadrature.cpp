#include "ballnls/quadrature.hpp"

#include <cmath>
#include <numbers>

#include "ballnls/error.hpp"

namespace ballnls {

GaussLegendre gauss_legendre(std::size_t points) {
  if (points == 0) throw DomainError("gauss_legendre: need at least one point");
  GaussLegendre gl;
  gl.nodes.resize(points);
  gl.weights.resize(points);
  const std::size_t half = (points + 1) / 2;
  const double n = static_cast<double>(points);
  for (std::size_t i = 0; i < half; ++i) {
    // Tricomi initial guess, then Newton on P_n.
    double x = std::cos(std::numbers::pi * (static_cast<double>(i) + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0, p1 = x;
      for (std::size_t k = 2; k <= points; ++k) {
        const double kk = static_cast<double>(k);
        const double p2 = ((2.0 * kk - 1.0) * x * p1 - (kk - 1.0) * p0) / kk;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    // Re-evaluate the derivative at the converged node.
    {
      double p0 = 1.0, p1 = x;
      for (std::size_t k = 2; k <= points; ++k) {
        const double kk = static_cast<double>(k);
        const double p2 = ((2.0 * kk - 1.0) * x * p1 - (kk - 1.0) * p0) / kk;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
    }
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    gl.nodes[i] = -x;
    gl.nodes[points - 1 - i] = x;
    gl.weights[i] = w;
    gl.weights[points - 1 - i] = w;
  }
  if (points % 2 == 1) gl.nodes[points / 2] = 0.0;
  return gl;
}

QuadratureRule::QuadratureRule(std::size_t panels, std::size_t points_per_panel)
    : panels_(panels), points_(points_per_panel), tmpl_(gauss_legendre(points_per_panel)) {
  if (panels == 0) throw DomainError("QuadratureRule: need at least one panel");
  nodes_.reserve(panels * points_per_panel);
  weights_.reserve(panels * points_per_panel);
  const double width = 1.0 / static_cast<double>(panels);
  for (std::size_t p = 0; p < panels; ++p) {
    const double a = width * static_cast<double>(p);
    for (std::size_t i = 0; i < points_per_panel; ++i) {
      nodes_.push_back(a + 0.5 * width * (tmpl_.nodes[i] + 1.0));
      weights_.push_back(0.5 * width * tmpl_.weights[i]);
    }
  }
}

QuadratureRule QuadratureRule::for_half_waves(std::size_t k, std::size_t nodes_per_oscillation) {
  if (nodes_per_oscillation < kMinNodesPerOscillation) {
    throw ResolutionError("QuadratureRule: fewer than 8 nodes per oscillation requested");
  }
  const std::size_t panels = k < 2 ? 1 : (k + 1) / 2;
  return QuadratureRule(panels, nodes_per_oscillation);
}

std::size_t QuadratureRule::resolved_half_waves() const {
  // One period of sin(k*pi*r) spans 2/k; each panel has width 1/panels.
  return 2 * panels_ * points_ / kMinNodesPerOscillation;
}

}  // namespace ballnls
