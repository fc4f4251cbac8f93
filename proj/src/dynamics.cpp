#include "ballnls/dynamics.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "ballnls/measures.hpp"

namespace ballnls {

namespace {

constexpr double kPi = std::numbers::pi;

Complex phase(double angle) { return {std::cos(angle), std::sin(angle)}; }

// a_n <- exp(-i 2 pi n^2 h) a_n.
void linear_flow(std::vector<Complex>& a, double h) {
  for (std::size_t i = 0; i < a.size(); ++i) a[i] *= phase(-linear_frequency(int(i + 1)) * h);
}

double kinetic(const RadialState& s) {
  double acc = 0.0;
  for (int n = 1; n <= s.N(); ++n) acc += static_cast<double>(n) * n * std::norm(s[n]);
  return 2.0 * kPi * kPi * acc;
}

}  // namespace

IntegratorMethod parse_integrator(const std::string& name) {
  if (name == "reference" || name == "reference_rk4") return IntegratorMethod::kReferenceRk4;
  if (name == "collocation" || name == "collocation_rk4") return IntegratorMethod::kCollocationRk4;
  if (name == "split" || name == "collocation_split") return IntegratorMethod::kCollocationSplit;
  throw ConfigError("unknown integrator '" + name +
                    "' (expected reference_rk4 | collocation_rk4 | collocation_split)");
}

std::string to_string(IntegratorMethod method) {
  switch (method) {
    case IntegratorMethod::kReferenceRk4: return "reference_rk4";
    case IntegratorMethod::kCollocationRk4: return "collocation_rk4";
    case IntegratorMethod::kCollocationSplit: return "collocation_split";
  }
  return "unknown";
}

double IntegratorConfig::default_dt(int N) {
  const double n = std::max(N, 1);
  return std::min(1e-3, 0.1 / (2.0 * kPi * n * n));
}

void IntegratorConfig::validate() const {
  if (!(dt > 0.0) || !std::isfinite(dt)) throw DomainError("IntegratorConfig: dt must be positive");
  if (!std::isfinite(coupling)) throw DomainError("IntegratorConfig: coupling must be finite");
  if (method != IntegratorMethod::kReferenceRk4 &&
      nodes_per_oscillation < QuadratureRule::kMinNodesPerOscillation) {
    throw ResolutionError("IntegratorConfig: collocation needs >= 8 nodes per oscillation");
  }
}

double mass(const RadialState& state) {
  double acc = 0.0;
  for (const auto& a : state.coeffs) acc += std::norm(a);
  return 2.0 * kPi * acc;
}

Complex nonlinear_coefficient(const RadialState& state, EigenIndex n, const CorrelationTensor& tensor) {
  const int N = state.N();
  if (n.value() > N || N > tensor.n_max()) {
    throw ResolutionError("nonlinear_coefficient: need n <= N <= tensor n_max");
  }
  Complex acc{};
  for (int n1 = 1; n1 <= N; ++n1)
    for (int n2 = 1; n2 <= N; ++n2)
      for (int n3 = 1; n3 <= N; ++n3)
        acc += tensor(n.value(), n1, n2, n3) * state[n1] * std::conj(state[n2]) * state[n3];
  return acc / (2.0 * kPi);
}

Propagator::Propagator(int N, IntegratorConfig config, const CorrelationTensor& tensor)
    : N_(N), config_(config) {
  config_.validate();
  if (config_.method == IntegratorMethod::kReferenceRk4) {
    dense_ = std::make_shared<const std::vector<double>>(tensor.dense(N));
  } else {
    grid_ = std::make_shared<const ModalGrid>(N, config_.nodes_per_oscillation);
  }
}

Propagator::Propagator(int N, IntegratorConfig config) : N_(N), config_(config) {
  config_.validate();
  if (config_.method == IntegratorMethod::kReferenceRk4) {
    throw DomainError("Propagator: the reference integrator needs a correlation tensor");
  }
  grid_ = std::make_shared<const ModalGrid>(N, config_.nodes_per_oscillation);
}

Propagator::Propagator(int N, IntegratorConfig config, std::shared_ptr<const ModalGrid> grid)
    : N_(N), config_(config), grid_(std::move(grid)) {
  config_.validate();
  if (config_.method == IntegratorMethod::kReferenceRk4) {
    throw DomainError("Propagator: the reference integrator needs a correlation tensor");
  }
  if (!grid_ || grid_->N() < N) throw ResolutionError("Propagator: grid does not cover N modes");
}

void Propagator::nonlinear(const RadialState& state, std::span<Complex> out) const {
  if (grid_) {
    grid_->nonlinear_coefficients(state, out);
    return;
  }
  const std::size_t n = static_cast<std::size_t>(N_);
  const auto& c = *dense_;
  // S(p, q) = sum_{r,s} c[p,q,r,s] Re(conj(a_r) a_s); symmetric in (p, q).
  std::vector<double> R(n * n);
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t s = 0; s < n; ++s) {
      const Complex& ar = state.coeffs[r];
      const Complex& as = state.coeffs[s];
      R[r * n + s] = ar.real() * as.real() + ar.imag() * as.imag();
    }
  std::vector<double> S(n * n);
  for (std::size_t p = 0; p < n; ++p)
    for (std::size_t q = p; q < n; ++q) {
      const double* row = &c[(p * n + q) * n * n];
      double acc = 0.0;
      for (std::size_t k = 0; k < n * n; ++k) acc += row[k] * R[k];
      S[p * n + q] = acc;
      S[q * n + p] = acc;
    }
  for (std::size_t p = 0; p < n; ++p) {
    Complex acc{};
    for (std::size_t q = 0; q < n; ++q) acc += S[p * n + q] * state.coeffs[q];
    out[p] = acc / (2.0 * kPi);
  }
}

std::pair<double, double> Propagator::conserved(const RadialState& state) const {
  if (grid_) return conserved_quantities(state, *grid_);
  std::vector<Complex> g(static_cast<std::size_t>(N_));
  nonlinear(state, g);
  // int |u|^4 = 2 pi sum conj(a_n) G_n.
  Complex q{};
  for (int n = 1; n <= N_; ++n) q += std::conj(state[n]) * g[n - 1];
  return {mass(state), kinetic(state) + 0.25 * 2.0 * kPi * q.real()};
}

RadialState Propagator::step(const RadialState& state) const { return step(state, config_.dt); }

RadialState Propagator::step(const RadialState& state, double h) const {
  if (state.N() != N_) throw DomainError("Propagator: state size does not match N");
  RadialState next = config_.method == IntegratorMethod::kCollocationSplit ? step_split(state, h)
                                                                           : step_rk4(state, h);
  if (!next.finite()) {
    std::ostringstream msg;
    msg << "non-finite coefficients at t = " << next.time;
    throw BlowUpError(msg.str(), state);
  }
  return next;
}

RadialState Propagator::step_rk4(const RadialState& state, double h) const {
  const std::size_t n = static_cast<std::size_t>(N_);
  const Complex minus_i_g(0.0, -config_.coupling);
  std::vector<Complex> e_half(n), e_full(n);
  for (std::size_t i = 0; i < n; ++i) {
    e_half[i] = phase(-linear_frequency(int(i + 1)) * 0.5 * h);
    e_full[i] = e_half[i] * e_half[i];
  }
  auto rhs = [&](const std::vector<Complex>& a, std::vector<Complex>& k) {
    RadialState tmp(a, 0.0);
    nonlinear(tmp, k);
    for (auto& v : k) v *= minus_i_g;
  };
  const auto& a = state.coeffs;
  std::vector<Complex> k1(n), k2(n), k3(n), k4(n), u(n);
  if (config_.coupling == 0.0) {
    RadialState out(a, state.time + h);
    for (std::size_t i = 0; i < n; ++i) out.coeffs[i] *= e_full[i];
    return out;
  }
  rhs(a, k1);
  for (std::size_t i = 0; i < n; ++i) u[i] = e_half[i] * (a[i] + 0.5 * h * k1[i]);
  rhs(u, k2);
  for (std::size_t i = 0; i < n; ++i) u[i] = e_half[i] * a[i] + 0.5 * h * k2[i];
  rhs(u, k3);
  for (std::size_t i = 0; i < n; ++i) u[i] = e_full[i] * a[i] + h * e_half[i] * k3[i];
  rhs(u, k4);
  RadialState out(N_, state.time + h);
  for (std::size_t i = 0; i < n; ++i) {
    out.coeffs[i] = e_full[i] * a[i] +
                    (h / 6.0) * (e_full[i] * k1[i] + 2.0 * e_half[i] * (k2[i] + k3[i]) + k4[i]);
  }
  return out;
}

RadialState Propagator::step_split(const RadialState& state, double h) const {
  std::vector<Complex> a = state.coeffs;
  linear_flow(a, 0.5 * h);
  if (config_.coupling != 0.0) {
    RadialState mid(a, 0.0);
    auto w = grid_->synthesize(mid);
    const auto& r = grid_->rule().nodes();
    for (std::size_t j = 0; j < w.size(); ++j) {
      const double density = std::norm(w[j]) / (r[j] * r[j]);
      w[j] *= phase(-config_.coupling * density * h);
    }
    grid_->project(w, a);
  }
  linear_flow(a, 0.5 * h);
  return RadialState(std::move(a), state.time + h);
}

RadialState step_reference(const RadialState& state, const IntegratorConfig& config,
                           const CorrelationTensor& tensor) {
  if (config.method != IntegratorMethod::kReferenceRk4) {
    throw DomainError("step_reference: config.method must be reference_rk4");
  }
  return Propagator(state.N(), config, tensor).step(state);
}

RadialState step_collocation(const RadialState& state, const IntegratorConfig& config,
                             const QuadratureRule& rule) {
  if (config.method == IntegratorMethod::kReferenceRk4) {
    throw DomainError("step_collocation: config.method must be a collocation method");
  }
  auto grid = std::make_shared<const ModalGrid>(state.N(), rule);
  return Propagator(state.N(), config, grid).step(state);
}

Trajectory evolve(const RadialState& state, double t_end, const Propagator& propagator, double dt_record) {
  const double dt = propagator.config().dt;
  if (!(t_end >= state.time)) throw DomainError("evolve: t_end precedes the state time");
  if (dt_record == 0.0) dt_record = dt;
  const double per_record = dt_record / dt;
  const long steps_per_record = std::lround(per_record);
  if (steps_per_record < 1 || std::abs(per_record - steps_per_record) > 1e-9 * per_record) {
    throw DomainError("evolve: dt_record must be a positive multiple of dt");
  }
  const double span = t_end - state.time;
  const double records_real = span / dt_record;
  const long records = std::lround(records_real);
  if (std::abs(records_real - records) > 1e-9 * std::max(1.0, records_real)) {
    throw DomainError("evolve: t_end - t0 must be a multiple of dt_record");
  }

  Trajectory traj;
  traj.config = propagator.config();
  traj.dt_record = dt_record;
  traj.states.reserve(static_cast<std::size_t>(records) + 1);
  auto record = [&](const RadialState& s) {
    const auto [m, e] = propagator.conserved(s);
    traj.states.push_back(s);
    traj.mass_log.push_back(m);
    traj.energy_log.push_back(e);
  };
  record(state);
  const double m0 = traj.mass_log.front();
  const double t0 = state.time;
  RadialState current = state;
  try {
    for (long k = 1; k <= records; ++k) {
      for (long j = 0; j < steps_per_record; ++j) current = propagator.step(current);
      current.time = t0 + static_cast<double>(k) * dt_record;
      const double m = mass(current);
      if (m0 > 0.0 && std::abs(m - m0) > 0.01 * m0) {
        std::ostringstream msg;
        msg << "mass jumped from " << m0 << " to " << m << " at t = " << current.time;
        throw BlowUpError(msg.str(), traj.states.back());
      }
      record(current);
    }
  } catch (BlowUpError& err) {
    err.partial = std::make_shared<Trajectory>(std::move(traj));
    throw;
  }
  return traj;
}

Trajectory evolve(const RadialState& state, double t_end, const IntegratorConfig& config,
                  const CorrelationTensor& tensor, double dt_record) {
  return evolve(state, t_end, Propagator(state.N(), config, tensor), dt_record);
}

Trajectory evolve(const RadialState& state, double t_end, const IntegratorConfig& config,
                  const QuadratureRule& rule, double dt_record) {
  auto grid = std::make_shared<const ModalGrid>(state.N(), rule);
  return evolve(state, t_end, Propagator(state.N(), config, grid), dt_record);
}

std::pair<double, double> conserved_quantities(const RadialState& state, const CorrelationTensor& tensor) {
  return {mass(state), kinetic(state) + 0.25 * quartic_norm(state, tensor)};
}

std::pair<double, double> conserved_quantities(const RadialState& state, const ModalGrid& grid) {
  return {mass(state), kinetic(state) + 0.25 * grid.quartic_norm(state)};
}

}  // namespace ballnls
