#include "ballnls/grid.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "ballnls/error.hpp"

namespace ballnls {

ModalGrid::ModalGrid(int N, std::size_t nodes_per_oscillation)
    : ModalGrid(N, QuadratureRule::for_half_waves(static_cast<std::size_t>(4 * std::max(N, 1)),
                                                  nodes_per_oscillation)) {}

ModalGrid::ModalGrid(int N, QuadratureRule rule) : N_(N), rule_(std::move(rule)) {
  if (N < 0) throw DomainError("ModalGrid: N must be >= 0");
  if (rule_.resolved_half_waves() < static_cast<std::size_t>(4 * N)) {
    throw ResolutionError("ModalGrid: rule resolves " + std::to_string(rule_.resolved_half_waves()) +
                          " half-waves, quartic products at N = " + std::to_string(N) + " need " +
                          std::to_string(4 * N));
  }
  const std::size_t M = rule_.size();
  table_.resize(static_cast<std::size_t>(N) * M);
  inv_r2_.resize(M);
  for (std::size_t j = 0; j < M; ++j) {
    const double r = rule_.nodes()[j];
    inv_r2_[j] = 1.0 / (r * r);
    for (int n = 1; n <= N; ++n) {
      table_[static_cast<std::size_t>(n - 1) * M + j] = std::sin(n * std::numbers::pi * r);
    }
  }
}

void ModalGrid::synthesize(const RadialState& state, std::span<Complex> w) const {
  if (state.N() > N_) {
    throw ResolutionError("ModalGrid: state has " + std::to_string(state.N()) +
                          " modes, grid supports " + std::to_string(N_));
  }
  const std::size_t M = rule_.size();
  std::fill(w.begin(), w.end(), Complex{});
  for (int n = 1; n <= state.N(); ++n) {
    const Complex a = state[n];
    if (a == Complex{}) continue;
    const double* row = &table_[static_cast<std::size_t>(n - 1) * M];
    for (std::size_t j = 0; j < M; ++j) w[j] += a * row[j];
  }
}

std::vector<Complex> ModalGrid::synthesize(const RadialState& state) const {
  std::vector<Complex> w(rule_.size());
  synthesize(state, w);
  return w;
}

void ModalGrid::project(std::span<const Complex> values, std::span<Complex> out) const {
  const std::size_t M = rule_.size();
  const auto& wt = rule_.weights();
  for (int n = 1; n <= N_; ++n) {
    const double* row = &table_[static_cast<std::size_t>(n - 1) * M];
    Complex acc{};
    for (std::size_t j = 0; j < M; ++j) acc += (wt[j] * row[j]) * values[j];
    out[static_cast<std::size_t>(n - 1)] = 2.0 * acc;
  }
}

double ModalGrid::quartic_norm(const RadialState& state) const {
  const auto w = synthesize(state);
  const auto& wt = rule_.weights();
  double acc = 0.0;
  for (std::size_t j = 0; j < w.size(); ++j) {
    const double m = std::norm(w[j]);
    acc += wt[j] * m * m * inv_r2_[j];
  }
  return 4.0 * std::numbers::pi * acc;
}

void ModalGrid::nonlinear_coefficients(const RadialState& state, std::span<Complex> out) const {
  auto w = synthesize(state);
  for (std::size_t j = 0; j < w.size(); ++j) w[j] *= std::norm(w[j]) * inv_r2_[j];
  project(w, out);
}

}  // namespace ballnls
