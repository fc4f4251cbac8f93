#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "ballnls/basis.hpp"
#include "ballnls/dynamics.hpp"
#include "ballnls/measures.hpp"
#include "ballnls/norms.hpp"
#include "ballnls/stats.hpp"

namespace ballnls {

/// Runs body(k) for k in [0, count) on up to `threads` workers (0 = hardware
/// concurrency). Each index is processed exactly once; callers write into
/// slot k, so the merged result does not depend on scheduling.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body, unsigned threads = 0);

/// Measure and integrator settings shared by the ensemble experiments.
struct EnsembleSettings {
  std::uint64_t seed = 0;
  MeasurePreset preset = MeasurePreset::kDerived;
  double beta = 0.25;  // quartic inverse temperature
  long max_attempts = 100000;
  IntegratorMethod integrator = IntegratorMethod::kCollocationRk4;
  double dt = 0.0;  // 0: IntegratorConfig::default_dt(N)
  double coupling = 1.0;
  unsigned threads = 0;
};

struct ObservableKs {
  std::string name;
  double statistic = 0.0;
  double critical = 0.0;
};

struct InvarianceReport {
  int N = 0;
  long samples = 0;
  double t_compare = 0.0;
  double beta = 0.0;
  MeasurePreset preset = MeasurePreset::kDerived;
  std::vector<ObservableKs> observables;
  double acceptance_rate = 0.0;  // accepted / attempts over the ensemble
  long total_attempts = 0;
  double max_relative_mass_drift = 0.0;

  bool passes() const;
};

/// Observables recorded per ensemble member.
inline const std::vector<std::string>& invariance_observable_names() {
  static const std::vector<std::string> names{"quartic_norm", "re_a1", "abs_a1_sq", "mean_mode_index"};
  return names;
}

/// Gibbs samples (member k on stream k) evolved to t_compare; two-sample KS
/// between the t = 0 and t = t_compare marginals of each observable.
InvarianceReport run_invariance(int N, long samples, double t_compare, const EnsembleSettings& settings);

enum class TailKind { kL4, kMixed, kXsb };
TailKind parse_tail_kind(const std::string& name);
std::string to_string(TailKind kind);

struct TailSettings {
  TailKind kind = TailKind::kL4;
  bool gibbs = false;  // false: free measure
  double p = 4.0, q = 4.0;  // mixed kind
  double s = 0.0;           // mixed and xsb kinds (weights n^s)
  double b = 0.45;          // xsb kind
  int grid_points = 40;
  int bootstrap = 200;
};

struct TailReport {
  TailSettings settings;
  int N = 0;
  long samples = 0;
  TailFit fit;
  std::vector<double> values;  // per-sample norm, index order
  double acceptance_rate = 1.0;
};

/// Monte Carlo survival curve of the chosen norm and the fit
/// log P(X > lambda) = -c lambda^kappa. Mixed and xsb kinds evolve each
/// sample over a unit window recorded at S = 2^k >= 16 N^2 samples first.
TailReport run_tail_experiment(int N, long samples, const TailSettings& tail, const EnsembleSettings& settings);

struct BlockReport {
  int N = 0;
  long samples = 0;
  int q = 6;
  std::vector<int> n2_values;
  std::vector<double> block_max;                    // per sample
  std::vector<std::vector<double>> chaos_deviation;  // [N2 index][sample]
  std::vector<double> block_median;
  std::vector<double> chaos_median;  // per N2
};

/// For free-measure samples evolved over a unit window (recorded every
/// `dt_record`):
///   block_max  = max over dyadic [M, 2M) of M^{1/2} ||P_M u||_{L^q_t L^2_x},
///   chaos_deviation(N2) = max_n || sum_{n2 ~ N2} c(n, n, n2, n2)
///       (|a_n2(t)|^2 / sigma_n2^2) / n2^2 - sigma_{n, N2} ||_{L^4_t}.
/// Needs tensor.n_max >= max(N, 2 max N2 - 1).
BlockReport run_block_observables(int N, long samples, const CorrelationTensor& tensor,
                                  const EnsembleSettings& settings, std::vector<int> n2_values = {4, 8, 16},
                                  double dt_record = 1.0 / 64.0);

/// Block observable for one trajectory (also the zero-field and
/// single-block checks).
double block_observable(const Trajectory& traj, int q);
double chaos_observable(const Trajectory& traj, const FreeMeasureSpec& spec, int N2, const CorrelationTensor& tensor);

struct ConvergenceLadder {
  std::uint64_t seed = 0;
  std::vector<int> N_values;
  double s = 0.0;
  double t_end = 0.0;
  double dt = 0.0;
  double dt_record = 0.0;
  IntegratorMethod integrator = IntegratorMethod::kCollocationSplit;
  std::vector<double> diffs;  // D for (N_values[i], N_values[i+1])
  double fitted_exponent = 0.0;
  bool strictly_decreasing = false;
};

struct LadderSettings {
  double s = 0.4;
  double t_end = 0.5;
  double dt = 0.0;         // 0: default_dt(max N), shared by every run
  double dt_record = 0.0;  // 0: t_end / 64 rounded to a multiple of dt
  IntegratorMethod integrator = IntegratorMethod::kCollocationSplit;
  MeasurePreset preset = MeasurePreset::kDerived;
  double coupling = 1.0;
  double window_c = 0.0;  // > 0: evolve in sub-windows of choose_window(max N, c)
  unsigned threads = 0;
};

/// Common random numbers: g_n for n <= max N from RngStream(seed, 0); run N
/// starts from (sigma_n g_n)_{n <= N}. D_N is the sup over the shared record
/// times of hs_norm(u_{N'} - u_N, s), u_N zero padded to N' modes.
ConvergenceLadder run_convergence_ladder(std::uint64_t seed, std::vector<int> N_values, const LadderSettings& settings);

/// c / log(N_star).
double choose_window(int N_star, double c_window);

/// Lemma-style mixed-norm embeddings ||f||_{L^p_x L^q_t} <= C ||f||_{s,b}.
struct EmbeddingParams {
  int clause = 1;  // 1..8
  double p = 2.5;
  double q = 2.0;
  double s = 0.0;
  double b = 0.3;
  double epsilon = 0.0;
};

/// Representative parameters: (i) p=2.5, b=0.3; (iii) p=3, b=0.4, s=0.01;
/// (vii) p=q=2.5, b=0.55; the remaining clauses get interior points.
EmbeddingParams embedding_defaults(int clause);
/// Fills the exponents a clause fixes (q for (i)-(iv), (vii); s = epsilon
/// for (iii); s = 0 for (i), (vii), (viii)) and checks the clause
/// hypotheses, raising DomainError on violation.
EmbeddingParams resolve_embedding(EmbeddingParams params);
std::string clause_name(int clause);

struct EmbeddingReport {
  EmbeddingParams params;
  int N = 0;
  int trials = 0;
  double decay = 1.0;
  std::vector<double> ratios;
  double max_ratio = 0.0;
  double median_ratio = 0.0;
};

/// Random spectra f_{n,m} = g_{n,m} n^{-1} <n^2 - m>^{-decay} on
/// |m| <= 2N^2, trial k on stream k; ratio mixed_norm / xsb_norm.
EmbeddingReport run_embedding_study(const EmbeddingParams& params, int N, int trials, std::uint64_t seed,
                                    double decay = 1.0, unsigned threads = 0);

/// mixed_norm / xsb_norm for one spectrum (time samples S = 2^k >= 16 N^2
/// and >= m_count; spatial rule with 8 nodes per oscillation of mode N).
double embedding_ratio(const SpaceTimeSpectrum& spec, const EmbeddingParams& params);

}  // namespace ballnls
