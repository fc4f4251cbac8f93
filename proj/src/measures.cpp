#include "ballnls/measures.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "ballnls/error.hpp"

namespace ballnls {

MeasurePreset parse_measure_preset(const std::string& name) {
  if (name == "derived") return MeasurePreset::kDerived;
  if (name == "paper-literal") return MeasurePreset::kPaperLiteral;
  throw ConfigError("unknown measure preset '" + name + "' (expected derived | paper-literal)");
}

std::string to_string(MeasurePreset preset) {
  return preset == MeasurePreset::kDerived ? "derived" : "paper-literal";
}

double preset_beta(MeasurePreset) { return 0.25; }

FreeMeasureSpec FreeMeasureSpec::preset(MeasurePreset preset, int N) {
  if (N < 0) throw DomainError("FreeMeasureSpec: N must be >= 0");
  FreeMeasureSpec spec;
  spec.N = N;
  spec.sigma.resize(static_cast<std::size_t>(N));
  const double scale = preset == MeasurePreset::kDerived ? std::numbers::sqrt2 : 1.0;
  for (int n = 1; n <= N; ++n) spec.sigma[n - 1] = 1.0 / (scale * std::numbers::pi * n);
  return spec;
}

void FreeMeasureSpec::validate() const {
  if (N < 0 || sigma.size() != static_cast<std::size_t>(N)) {
    throw DomainError("FreeMeasureSpec: sigma must have exactly N entries");
  }
  for (double s : sigma) {
    if (!std::isfinite(s) || s < 0.0) throw DomainError("FreeMeasureSpec: sigma_n must be finite and >= 0");
  }
}

RadialState sample_free(const FreeMeasureSpec& spec, RngStream& rng) {
  spec.validate();
  RadialState state(spec.N);
  for (int n = 1; n <= spec.N; ++n) state[n] = spec.sigma[n - 1] * rng.complex_normal();
  return state;
}

GibbsSample sample_gibbs(const FreeMeasureSpec& spec, double beta_q, RngStream& rng, long max_attempts,
                         const ModalGrid& grid) {
  if (!(beta_q >= 0.0)) throw DomainError("sample_gibbs: beta_q must be >= 0");
  if (max_attempts < 1) throw DomainError("sample_gibbs: max_attempts must be >= 1");
  double weight_sum = 0.0;
  for (long attempt = 1; attempt <= max_attempts; ++attempt) {
    RadialState phi = sample_free(spec, rng);
    const double q = grid.quartic_norm(phi);
    const double exponent = -beta_q * q;
    const double accept = std::exp(exponent);
    weight_sum += accept;
    if (rng.uniform() < accept) return {std::move(phi), q, exponent, attempt};
  }
  const double rate = weight_sum / static_cast<double>(max_attempts);
  throw SamplingError("sample_gibbs: no acceptance in " + std::to_string(max_attempts) +
                          " attempts (estimated acceptance rate " + std::to_string(rate) + ")",
                      rate);
}

GibbsSample sample_gibbs(const FreeMeasureSpec& spec, double beta_q, RngStream& rng, long max_attempts) {
  return sample_gibbs(spec, beta_q, rng, max_attempts, ModalGrid(spec.N));
}

double quartic_norm(const RadialState& state, const CorrelationTensor& tensor) {
  const int N = state.N();
  if (N > tensor.n_max()) {
    throw ResolutionError("quartic_norm: state has " + std::to_string(N) + " modes, tensor cutoff " +
                          std::to_string(tensor.n_max()));
  }
  // P_pq = a_p conj(a_q); the sum is sum c[p,q,r,s] P_pq P_rs.
  std::vector<Complex> P(static_cast<std::size_t>(N) * N);
  for (int p = 1; p <= N; ++p)
    for (int q = 1; q <= N; ++q) P[(p - 1) * N + (q - 1)] = state[p] * std::conj(state[q]);
  Complex acc{};
  for (int p = 1; p <= N; ++p)
    for (int q = 1; q <= N; ++q) {
      const Complex pq = P[(p - 1) * N + (q - 1)];
      if (pq == Complex{}) continue;
      Complex inner{};
      for (int r = 1; r <= N; ++r)
        for (int s = 1; s <= N; ++s) inner += tensor(p, q, r, s) * P[(r - 1) * N + (s - 1)];
      acc += pq * inner;
    }
  return std::max(acc.real(), 0.0);
}

namespace {

ChaosEstimate estimate(std::span<const double> samples, int q, double scale) {
  const double n = static_cast<double>(samples.size());
  double sum = 0.0;
  for (double x : samples) sum += x;
  const double mean = sum / n;
  const double inv_q = 1.0 / q;
  // Leave-one-out jackknife on theta = mean^(1/q) / scale.
  double theta_bar = 0.0;
  std::vector<double> theta(samples.size());
  for (std::size_t i = 0; i < samples.size(); ++i) {
    theta[i] = std::pow((sum - samples[i]) / (n - 1.0), inv_q) / scale;
    theta_bar += theta[i];
  }
  theta_bar /= n;
  double var = 0.0;
  for (double t : theta) var += (t - theta_bar) * (t - theta_bar);
  var *= (n - 1.0) / n;
  return {mean, std::pow(mean, inv_q) / scale, std::sqrt(var)};
}

void check_chaos_args(std::span<const Complex> alpha, int q, long trials, double& l2) {
  if (q != 2 && q != 4 && q != 6 && q != 8) throw DomainError("chaos moment: q must be 2, 4, 6 or 8");
  if (trials < 100) throw PrecisionError("chaos moment: need at least 100 trials");
  l2 = 0.0;
  for (const auto& a : alpha) l2 += std::norm(a);
  if (!(l2 > 0.0)) throw DomainError("chaos moment: alpha must be nonzero");
  l2 = std::sqrt(l2);
}

}  // namespace

ChaosEstimate chaos_moment_ratio(std::span<const Complex> alpha, int q, long trials, RngStream& rng) {
  double l2 = 0.0;
  check_chaos_args(alpha, q, trials, l2);
  std::vector<double> samples(static_cast<std::size_t>(trials));
  for (auto& s : samples) {
    Complex x{};
    for (const auto& a : alpha) x += a * rng.complex_normal();
    s = std::pow(std::abs(x), q);
  }
  return estimate(samples, q, std::sqrt(static_cast<double>(q)) * l2);
}

ChaosEstimate centered_chaos_moment_ratio(std::span<const Complex> alpha, int q, long trials,
                                          RngStream& rng) {
  double l2 = 0.0;
  check_chaos_args(alpha, q, trials, l2);
  std::vector<double> samples(static_cast<std::size_t>(trials));
  for (auto& s : samples) {
    Complex x{};
    for (const auto& a : alpha) x += a * (std::norm(rng.complex_normal()) - 1.0);
    s = std::pow(std::abs(x), q);
  }
  return estimate(samples, q, static_cast<double>(q) * l2);
}

}  // namespace ballnls
