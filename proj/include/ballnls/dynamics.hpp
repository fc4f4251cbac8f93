#pragma once

#include <memory>
#include <span>
#include <string>
#include <vector>

#include "ballnls/basis.hpp"
#include "ballnls/error.hpp"
#include "ballnls/grid.hpp"
#include "ballnls/state.hpp"

namespace ballnls {

/// Coefficient ODE in model units:
///   i a_n' = 2 pi n^2 a_n + coupling * G_n(a),
///   G_n(a) = (1/2pi) sum_{n1,n2,n3} c(n, n1, n2, n3) a_n1 conj(a_n2) a_n3.
///
/// kReferenceRk4    integrating-factor RK4 with exact tensor contraction.
/// kCollocationRk4  same time stepper, G evaluated by collocation on a
///                  ModalGrid (O(N M) per evaluation).
/// kCollocationSplit Strang splitting: exact linear half steps around a
///                  pointwise phase rotation u -> u exp(-i coupling |u|^2 dt)
///                  followed by projection. Exact for coupling = 0; first
///                  order in dt against the Galerkin ODE (the rotation uses
///                  the unprojected |u|^2).
enum class IntegratorMethod { kReferenceRk4, kCollocationRk4, kCollocationSplit };

IntegratorMethod parse_integrator(const std::string& name);
std::string to_string(IntegratorMethod method);

struct IntegratorConfig {
  IntegratorMethod method = IntegratorMethod::kCollocationRk4;
  double dt = 1e-3;
  std::size_t nodes_per_oscillation = QuadratureRule::kDefaultNodesPerOscillation;
  double coupling = 1.0;

  /// min(1e-3, 0.1 / (2 pi N^2)).
  static double default_dt(int N);
  void validate() const;
};

/// Advisory size for the O(N^4) reference contraction.
inline constexpr int kReferenceAdvisoryLimit = 32;

struct Trajectory {
  std::vector<RadialState> states;
  std::vector<double> mass_log;
  std::vector<double> energy_log;
  IntegratorConfig config;
  double dt_record = 0.0;

  std::size_t size() const { return states.size(); }
  int N() const { return states.empty() ? 0 : states.front().N(); }
};

/// Non-finite coefficients or a mass jump above 1%. Carries the last finite
/// state and, when raised by evolve, the trajectory recorded so far.
class BlowUpError : public Error {
public:
  BlowUpError(const std::string& what, RadialState last_finite)
      : Error("blow-up", what), last_finite(std::move(last_finite)) {}
  RadialState last_finite;
  std::shared_ptr<Trajectory> partial;
};

/// G_n(a) by exact tensor contraction.
Complex nonlinear_coefficient(const RadialState& state, EigenIndex n, const CorrelationTensor& tensor);

/// Reusable stepper. Holds either a dense tensor slice (reference) or a
/// ModalGrid (collocation); both are shared read-only between copies.
class Propagator {
public:
  Propagator(int N, IntegratorConfig config, const CorrelationTensor& tensor);
  Propagator(int N, IntegratorConfig config);
  Propagator(int N, IntegratorConfig config, std::shared_ptr<const ModalGrid> grid);

  int N() const { return N_; }
  const IntegratorConfig& config() const { return config_; }
  const ModalGrid* grid() const { return grid_.get(); }

  /// Advances by h (defaults to config.dt). Throws BlowUpError.
  RadialState step(const RadialState& state) const;
  RadialState step(const RadialState& state, double h) const;

  /// G(a) for every mode, through whichever path this propagator uses.
  void nonlinear(const RadialState& state, std::span<Complex> out) const;

  /// (mass, energy) with the quartic term from the same path.
  std::pair<double, double> conserved(const RadialState& state) const;

private:
  RadialState step_rk4(const RadialState& state, double h) const;
  RadialState step_split(const RadialState& state, double h) const;

  int N_;
  IntegratorConfig config_;
  std::shared_ptr<const std::vector<double>> dense_;
  std::shared_ptr<const ModalGrid> grid_;
};

RadialState step_reference(const RadialState& state, const IntegratorConfig& config,
                           const CorrelationTensor& tensor);
RadialState step_collocation(const RadialState& state, const IntegratorConfig& config,
                             const QuadratureRule& rule);

/// Steps from state.time to t_end, recording every dt_record (a multiple of
/// config.dt; 0 means every step). t_end - state.time must be a multiple of
/// dt_record. A blow-up rethrows with the partial trajectory attached.
Trajectory evolve(const RadialState& state, double t_end, const Propagator& propagator,
                  double dt_record = 0.0);
Trajectory evolve(const RadialState& state, double t_end, const IntegratorConfig& config,
                  const CorrelationTensor& tensor, double dt_record = 0.0);
Trajectory evolve(const RadialState& state, double t_end, const IntegratorConfig& config,
                  const QuadratureRule& rule, double dt_record = 0.0);

/// mass = 2 pi sum |a_n|^2, energy = 2 pi^2 sum n^2 |a_n|^2 + (1/4) int |u|^4.
std::pair<double, double> conserved_quantities(const RadialState& state, const CorrelationTensor& tensor);
std::pair<double, double> conserved_quantities(const RadialState& state, const ModalGrid& grid);

double mass(const RadialState& state);

}  // namespace ballnls
