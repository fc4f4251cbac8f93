#pragma once

#include <span>
#include <string>
#include <vector>

#include "ballnls/basis.hpp"
#include "ballnls/grid.hpp"
#include "ballnls/rng.hpp"
#include "ballnls/state.hpp"

namespace ballnls {

/// Named (sigma_n, beta_q) pairs.
///  - kDerived: sigma_n = 1/(sqrt(2) pi n), beta_q = 1/4. exp(-E) with
///    E = 2 pi^2 sum n^2 |a_n|^2 + (1/4) int |u|^4 is the energy conserved by
///    i a_n' = 2 pi n^2 a_n + G_n(a), so this pair is flow invariant.
///  - kPaperLiteral: sigma_n = 1/(pi n), beta_q = 1/4.
enum class MeasurePreset { kDerived, kPaperLiteral };

MeasurePreset parse_measure_preset(const std::string& name);
std::string to_string(MeasurePreset preset);
double preset_beta(MeasurePreset preset);

/// Law of sum_{n<=N} sigma_n g_n e_n with E|g_n|^2 = 1.
struct FreeMeasureSpec {
  int N = 0;
  std::vector<double> sigma;  // sigma[n-1]

  static FreeMeasureSpec preset(MeasurePreset preset, int N);
  /// Validates sigma.size() == N, every sigma_n finite and >= 0.
  void validate() const;
};

struct GibbsSample {
  RadialState state;
  double quartic_norm = 0.0;
  double weight_exponent = 0.0;  // -beta_q * quartic_norm
  long attempts = 0;
};

RadialState sample_free(const FreeMeasureSpec& spec, RngStream& rng);

/// Rejection sampling from mu_F with acceptance probability
/// exp(-beta_q * ||phi||_4^4). The grid evaluates the quartic norm.
GibbsSample sample_gibbs(const FreeMeasureSpec& spec, double beta_q, RngStream& rng, long max_attempts,
                         const ModalGrid& grid);
GibbsSample sample_gibbs(const FreeMeasureSpec& spec, double beta_q, RngStream& rng, long max_attempts);

/// int_B |u|^4 dx = sum a_p conj(a_q) a_r conj(a_s) c(p, q, r, s).
double quartic_norm(const RadialState& state, const CorrelationTensor& tensor);

struct ChaosEstimate {
  double moment = 0.0;     // sample mean of |X|^q
  double ratio = 0.0;      // ||X||_q / (scale * ||alpha||_2)
  double std_error = 0.0;  // jackknife standard error of ratio
};

/// Monte Carlo ||sum alpha_n g_n||_{L^q} / (sqrt(q) ||alpha||_2), q in {2,4,6,8}.
ChaosEstimate chaos_moment_ratio(std::span<const Complex> alpha, int q, long trials, RngStream& rng);

/// Centered chaos ||sum alpha_n (|g_n|^2 - 1)||_{L^q} / (q ||alpha||_2).
ChaosEstimate centered_chaos_moment_ratio(std::span<const Complex> alpha, int q, long trials,
                                          RngStream& rng);

}  // namespace ballnls
