#include "ballnls/norms.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <unsupported/Eigen/FFT>

#include "ballnls/error.hpp"

namespace ballnls {

namespace {

constexpr double kPi = std::numbers::pi;

double modulation(int n, int m) { return std::abs(static_cast<double>(n) * n - static_cast<double>(m)); }

int wrap(long long m, int S) {
  long long r = m % S;
  return static_cast<int>(r < 0 ? r + S : r);
}

}  // namespace

double hs_norm(const RadialState& state, double s) {
  double acc = 0.0;
  for (int n = 1; n <= state.N(); ++n) acc += std::pow(static_cast<double>(n), 2.0 * s) * std::norm(state[n]);
  return std::sqrt(2.0 * kPi * acc);
}

double mixed_norm(const Trajectory& traj, double p, double q, const QuadratureRule& rule) {
  if (!(p >= 1.0) || !(q >= 1.0)) throw DomainError("mixed_norm: p and q must be >= 1");
  const std::size_t S = traj.size();
  const int N = traj.N();
  if (S < 2) throw ResolutionError("mixed_norm: trajectory needs at least two samples");
  const double dt = traj.dt_record > 0.0 ? traj.dt_record : traj.states[1].time - traj.states[0].time;
  if (N > 0 && dt > 1.0 / (16.0 * N * N) * (1.0 + 1e-12)) {
    throw ResolutionError("mixed_norm: fewer than 16 samples per linear period of mode N");
  }
  const bool sup = std::isinf(q);
  const std::size_t M = rule.size();
  const auto& r = rule.nodes();

  Eigen::MatrixXd table(N, static_cast<Eigen::Index>(M));
  for (int n = 1; n <= N; ++n)
    for (std::size_t j = 0; j < M; ++j) table(n - 1, static_cast<Eigen::Index>(j)) = std::sin(n * kPi * r[j]);

  std::vector<double> inner(M, 0.0);
  constexpr std::size_t kChunk = 2048;
  for (std::size_t k0 = 0; k0 < S; k0 += kChunk) {
    const std::size_t rows = std::min(kChunk, S - k0);
    Eigen::MatrixXd re(static_cast<Eigen::Index>(rows), N), im(static_cast<Eigen::Index>(rows), N);
    for (std::size_t k = 0; k < rows; ++k) {
      const RadialState& st = traj.states[k0 + k];
      for (int n = 1; n <= N; ++n) {
        const Complex a = n <= st.N() ? st[n] : Complex{};
        re(static_cast<Eigen::Index>(k), n - 1) = a.real();
        im(static_cast<Eigen::Index>(k), n - 1) = a.imag();
      }
    }
    const Eigen::MatrixXd wre = re * table;
    const Eigen::MatrixXd wim = im * table;
    for (std::size_t k = 0; k < rows; ++k) {
      const std::size_t idx = k0 + k;
      const double tw = (idx == 0 || idx + 1 == S) ? 0.5 * dt : dt;
      for (std::size_t j = 0; j < M; ++j) {
        const double x = wre(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(j));
        const double y = wim(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(j));
        const double mod2 = (x * x + y * y) / (r[j] * r[j]);
        if (sup) {
          inner[j] = std::max(inner[j], std::sqrt(mod2));
        } else {
          inner[j] += tw * (q == 2.0 ? mod2 : std::pow(mod2, 0.5 * q));
        }
      }
    }
  }
  double acc = 0.0;
  for (std::size_t j = 0; j < M; ++j) {
    const double v = sup ? std::pow(inner[j], p) : std::pow(inner[j], p / q);
    acc += rule.weights()[j] * v * r[j] * r[j];
  }
  return std::pow(4.0 * kPi * acc, 1.0 / p);
}

std::string to_string(Taper taper) { return taper == Taper::kNone ? "none" : "hann"; }

SpaceTimeSpectrum::SpaceTimeSpectrum(int N, int m_min, int m_count, Taper taper)
    : N_(N), m_min_(m_min), m_count_(m_count), taper_(taper) {
  if (N < 0 || m_count < 0) throw DomainError("SpaceTimeSpectrum: negative size");
  values_.assign(static_cast<std::size_t>(N) * static_cast<std::size_t>(m_count), Complex{});
}

Complex SpaceTimeSpectrum::get(int n, int m) const {
  if (n < 1 || n > N_ || m < m_min_ || m > m_max()) return {};
  return values_[index(n, m)];
}

bool SpaceTimeSpectrum::same_shape(const SpaceTimeSpectrum& o) const {
  return N_ == o.N_ && m_min_ == o.m_min_ && m_count_ == o.m_count_;
}

SpaceTimeSpectrum spectrum_from_trajectory(const Trajectory& traj, Taper taper) {
  if (!(traj.dt_record > 0.0)) throw ResolutionError("spectrum_from_trajectory: trajectory has no record spacing");
  const double s_real = 1.0 / traj.dt_record;
  const int S = static_cast<int>(std::lround(s_real));
  if (std::abs(s_real - S) > 1e-9 * s_real) {
    throw ResolutionError("spectrum_from_trajectory: 1/dt_record must be an integer sample count");
  }
  if (traj.size() < static_cast<std::size_t>(S)) {
    throw ResolutionError("spectrum_from_trajectory: trajectory shorter than a unit window");
  }
  const int N = traj.N();
  if (static_cast<long long>(S) < 8LL * N * N) {
    throw ResolutionError("spectrum_from_trajectory: " + std::to_string(S) +
                          " samples per unit window alias |m| <= 2N^2 (need >= 8N^2)");
  }
  const int m_min = -((S - 1) / 2);
  SpaceTimeSpectrum spec(N, m_min, S, taper);
  Eigen::FFT<double> fft;
  std::vector<Complex> x(static_cast<std::size_t>(S)), out;
  for (int n = 1; n <= N; ++n) {
    for (int k = 0; k < S; ++k) {
      Complex a = traj.states[static_cast<std::size_t>(k)][n];
      if (taper == Taper::kSmooth) {
        const double s = std::sin(kPi * k / S);
        a *= s * s;
      }
      x[static_cast<std::size_t>(k)] = a;
    }
    // inv(x)_j = (1/S) sum_k x_k exp(+2 pi i j k / S): the coefficient of e(-j t).
    fft.inv(out, x);
    for (int m = m_min; m < m_min + S; ++m) spec.at(n, m) = out[static_cast<std::size_t>(wrap(m, S))];
  }
  return spec;
}

Trajectory trajectory_from_spectrum(const SpaceTimeSpectrum& spec, int samples) {
  if (samples < spec.m_count() || samples < 1) {
    throw ResolutionError("trajectory_from_spectrum: fewer samples than stored time frequencies");
  }
  const int N = spec.N();
  Trajectory traj;
  traj.dt_record = 1.0 / samples;
  traj.config.coupling = 0.0;
  traj.config.dt = traj.dt_record;
  traj.states.assign(static_cast<std::size_t>(samples) + 1, RadialState(N));
  Eigen::FFT<double> fft;
  fft.SetFlag(Eigen::FFT<double>::Unscaled);
  std::vector<Complex> x(static_cast<std::size_t>(samples)), out;
  for (int n = 1; n <= N; ++n) {
    std::fill(x.begin(), x.end(), Complex{});
    for (int m = spec.m_min(); m <= spec.m_max(); ++m) x[static_cast<std::size_t>(wrap(m, samples))] += spec.at(n, m);
    // fwd(x)_k = sum_j x_j exp(-2 pi i j k / S) = a_n(t_k).
    fft.fwd(out, x);
    for (int k = 0; k <= samples; ++k) {
      traj.states[static_cast<std::size_t>(k)][n] = out[static_cast<std::size_t>(k % samples)];
    }
  }
  for (int k = 0; k <= samples; ++k) {
    auto& st = traj.states[static_cast<std::size_t>(k)];
    st.time = static_cast<double>(k) / samples;
    traj.mass_log.push_back(mass(st));
    // Synthesized fields carry no dynamics; the energy log is left undefined.
    traj.energy_log.push_back(std::numeric_limits<double>::quiet_NaN());
  }
  return traj;
}

double xsb_norm(const SpaceTimeSpectrum& spec, double s, double b) {
  double acc = 0.0;
  for (int n = 1; n <= spec.N(); ++n) {
    const double ws = std::pow(static_cast<double>(n), 2.0 * s);
    for (int m = spec.m_min(); m <= spec.m_max(); ++m) {
      const double f2 = std::norm(spec.at(n, m));
      if (f2 == 0.0) continue;
      acc += ws * std::pow(1.0 + modulation(n, m), 2.0 * b) * f2;
    }
  }
  return std::sqrt(acc);
}

TripleNormBound triple_norm_of_decomposition(const SpaceTimeSpectrum& spec, double T,
                                             const std::vector<Complex>& a) {
  if (!(T > 0.0)) throw DomainError("triple norm: T must be positive");
  const double inv_t = 1.0 / T;
  double first = 0.0, second = 0.0;
  for (int n = 1; n <= spec.N(); ++n) {
    const Complex an = static_cast<std::size_t>(n - 1) < a.size() ? a[n - 1] : Complex{};
    second += std::norm(an);
    for (int m = spec.m_min(); m <= spec.m_max(); ++m) {
      const double d = modulation(n, m);
      Complex resid = spec.at(n, m);
      if (d > inv_t) resid -= an / d;
      first += (d + inv_t) * std::norm(resid);
    }
  }
  TripleNormBound out;
  out.part_one_mass = std::sqrt(first);
  out.part_two_mass = std::sqrt(second);
  out.upper = out.part_one_mass + out.part_two_mass;
  out.second_family = a;
  out.second_family.resize(static_cast<std::size_t>(spec.N()));
  return out;
}

TripleNormBound triple_norm_upper(const SpaceTimeSpectrum& spec, double T) {
  if (!(T > 0.0)) throw DomainError("triple_norm_upper: T must be positive");
  const int N = spec.N();
  const double inv_t = 1.0 / T;
  // Per mode: c0 = sum W |f|^2, s1 = sum_Omega W p f, s2 = sum_Omega W p^2,
  // with W = |d| + 1/T, p = 1/|d|, Omega = {|d| > 1/T}.
  std::vector<double> c0(N, 0.0), s2(N, 0.0);
  std::vector<Complex> s1(N);
  for (int n = 1; n <= N; ++n) {
    for (int m = spec.m_min(); m <= spec.m_max(); ++m) {
      const double d = modulation(n, m);
      const double w = d + inv_t;
      const Complex f = spec.at(n, m);
      c0[n - 1] += w * std::norm(f);
      if (d > inv_t) {
        s1[n - 1] += (w / d) * f;
        s2[n - 1] += w / (d * d);
      }
    }
  }
  auto amplitudes = [&](double lambda) {
    std::vector<Complex> a(N);
    for (int i = 0; i < N; ++i) a[i] = s2[i] > 0.0 ? s1[i] / (s2[i] + lambda) : Complex{};
    return a;
  };
  auto objective = [&](double lambda) {
    const auto a = amplitudes(lambda);
    double first = 0.0, second = 0.0;
    for (int i = 0; i < N; ++i) {
      first += c0[i] - 2.0 * std::real(std::conj(a[i]) * s1[i]) + std::norm(a[i]) * s2[i];
      second += std::norm(a[i]);
    }
    return std::sqrt(std::max(first, 0.0)) + std::sqrt(second);
  };

  double scale = 0.0;
  for (double v : s2) scale = std::max(scale, v);
  TripleNormBound best = triple_norm_of_decomposition(spec, T, std::vector<Complex>(N));
  if (scale == 0.0) return best;

  // Coarse scan of the ridge path in log(lambda), then golden refinement.
  const double lo = std::log(scale) - 30.0, hi = std::log(scale) + 30.0;
  constexpr int kGrid = 121;
  int arg = 0;
  double val = std::numeric_limits<double>::infinity();
  for (int i = 0; i < kGrid; ++i) {
    const double v = objective(std::exp(lo + (hi - lo) * i / (kGrid - 1)));
    if (v < val) val = v, arg = i;
  }
  double a = lo + (hi - lo) * std::max(arg - 1, 0) / (kGrid - 1);
  double b = lo + (hi - lo) * std::min(arg + 1, kGrid - 1) / (kGrid - 1);
  const double g = (std::sqrt(5.0) - 1.0) / 2.0;
  double x1 = b - g * (b - a), x2 = a + g * (b - a);
  double f1 = objective(std::exp(x1)), f2 = objective(std::exp(x2));
  for (int it = 0; it < 80; ++it) {
    if (f1 < f2) {
      b = x2, x2 = x1, f2 = f1, x1 = b - g * (b - a), f1 = objective(std::exp(x1));
    } else {
      a = x1, x1 = x2, f1 = f2, x2 = a + g * (b - a), f2 = objective(std::exp(x2));
    }
  }
  for (double lambda : {std::exp(0.5 * (a + b)), 0.0}) {
    auto candidate = triple_norm_of_decomposition(spec, T, amplitudes(lambda));
    if (candidate.upper < best.upper) best = std::move(candidate);
  }
  return best;
}

RadialState dyadic_project(const RadialState& state, int lo, int hi) {
  if (lo < 1 || lo > hi) throw DomainError("dyadic_project: need 1 <= lo <= hi");
  RadialState out = state;
  for (int n = 1; n <= out.N(); ++n)
    if (n < lo || n > hi) out[n] = Complex{};
  return out;
}

SpaceTimeSpectrum dyadic_project(const SpaceTimeSpectrum& spec, int lo, int hi) {
  if (lo < 1 || lo > hi) throw DomainError("dyadic_project: need 1 <= lo <= hi");
  SpaceTimeSpectrum out = spec;
  for (int n = 1; n <= out.N(); ++n) {
    if (n >= lo && n <= hi) continue;
    for (int m = out.m_min(); m <= out.m_max(); ++m) out.at(n, m) = Complex{};
  }
  return out;
}

namespace {

template <class Tensor>
Complex trilinear_impl(const SpaceTimeSpectrum& v, const SpaceTimeSpectrum& v1, const SpaceTimeSpectrum& u2,
                       const SpaceTimeSpectrum& u3, const Tensor& tensor) {
  if (!v.same_shape(v1) || !v.same_shape(u2) || !v.same_shape(u3)) {
    throw DomainError("trilinear_form: spectra must share N and the m range");
  }
  const int N = v.N();
  const int M = v.m_count();
  if (N > tensor.n_max()) throw ResolutionError("trilinear_form: N exceeds tensor cutoff");
  const double work = std::pow(static_cast<double>(N), 4) * static_cast<double>(M) * M;
  if (work > kTrilinearWorkLimit) {
    throw ResolutionError("trilinear_form: N^4 M^2 work bound exceeded (N <= 24 advised)");
  }
  // With k = m1 - m = m2 - m3:
  //   A(n, n1, k) = sum_m conj(v_{n,m}) v1_{n1,m+k},
  //   B(n2, n3, k) = sum_m3 conj(u2_{n2,m3+k}) u3_{n3,m3}.
  const int K = 2 * M - 1;
  auto correlate = [&](const SpaceTimeSpectrum& x, const SpaceTimeSpectrum& y, bool conj_first) {
    std::vector<Complex> out(static_cast<std::size_t>(N) * N * K);
    for (int a = 1; a <= N; ++a)
      for (int b = 1; b <= N; ++b)
        for (int k = -(M - 1); k <= M - 1; ++k) {
          Complex acc{};
          for (int i = std::max(0, -k); i < std::min(M, M - k); ++i) {
            const int m = v.m_min() + i;
            if (conj_first) {
              acc += std::conj(x.at(a, m)) * y.at(b, m + k);
            } else {
              acc += std::conj(x.at(a, m + k)) * y.at(b, m);
            }
          }
          out[(static_cast<std::size_t>(a - 1) * N + (b - 1)) * K + (k + M - 1)] = acc;
        }
    return out;
  };
  const auto A = correlate(v, v1, true);
  const auto B = correlate(u2, u3, false);
  Complex total{};
  for (int n = 1; n <= N; ++n)
    for (int n1 = 1; n1 <= N; ++n1)
      for (int n2 = 1; n2 <= N; ++n2)
        for (int n3 = 1; n3 <= N; ++n3) {
          const double c = tensor(n, n1, n2, n3);
          if (c == 0.0) continue;
          const Complex* pa = &A[(static_cast<std::size_t>(n - 1) * N + (n1 - 1)) * K];
          const Complex* pb = &B[(static_cast<std::size_t>(n2 - 1) * N + (n3 - 1)) * K];
          Complex acc{};
          for (int k = 0; k < K; ++k) acc += pa[k] * pb[k];
          total += c * acc;
        }
  return total;
}

}  // namespace

Complex trilinear_form(const SpaceTimeSpectrum& v, const SpaceTimeSpectrum& v1, const SpaceTimeSpectrum& u2,
                       const SpaceTimeSpectrum& u3, const CorrelationTensor& tensor) {
  return trilinear_impl(v, v1, u2, u3, tensor);
}

Complex trilinear_form(const SpaceTimeSpectrum& v, const SpaceTimeSpectrum& v1, const SpaceTimeSpectrum& u2,
                       const SpaceTimeSpectrum& u3, const TruncatedTensorView& tensor) {
  return trilinear_impl(v, v1, u2, u3, tensor);
}

double window_mean_square(const SpaceTimeSpectrum& spec, double T) {
  if (!(T > 0.0)) throw DomainError("window_mean_square: T must be positive");
  // int_0^T e(d t) dt = T for d = 0, (e(dT) - 1) / (2 pi i d) otherwise.
  auto kernel = [T](int d) -> Complex {
    if (d == 0) return T;
    const double x = 2.0 * kPi * d;
    return (Complex(std::cos(x * T), std::sin(x * T)) - 1.0) / Complex(0.0, x);
  };
  double total = 0.0;
  std::vector<std::pair<int, Complex>> nz;
  for (int n = 1; n <= spec.N(); ++n) {
    nz.clear();
    for (int m = spec.m_min(); m <= spec.m_max(); ++m)
      if (spec.at(n, m) != Complex{}) nz.emplace_back(m, spec.at(n, m));
    Complex acc{};
    // |sum f_m e(-m t)|^2 = sum f_m conj(f_m') e((m' - m) t).
    for (const auto& [m, f] : nz)
      for (const auto& [mp, g] : nz) acc += f * std::conj(g) * kernel(mp - m);
    total += acc.real();
  }
  return 2.0 * kPi * total / T;
}

double lemma1_check(const SpaceTimeSpectrum& spec, double T) {
  const double bound = triple_norm_upper(spec, T).upper;
  if (!(bound > 0.0)) throw UndefinedRatioError("lemma1_check: zero triple norm");
  return window_mean_square(spec, T) / (bound * bound);
}

double pairing(const SpaceTimeSpectrum& f, const SpaceTimeSpectrum& g) {
  if (!f.same_shape(g)) throw DomainError("pairing: spectra must share N and the m range");
  Complex acc{};
  for (std::size_t i = 0; i < f.values().size(); ++i) acc += f.values()[i] * g.values()[i];
  return std::abs(acc);
}

}  // namespace ballnls
