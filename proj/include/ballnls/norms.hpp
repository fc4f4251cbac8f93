#pragma once

#include <string>
#include <vector>

#include "ballnls/basis.hpp"
#include "ballnls/dynamics.hpp"
#include "ballnls/state.hpp"

namespace ballnls {

/// (2 pi sum n^{2s} |a_n|^2)^{1/2}.
double hs_norm(const RadialState& state, double s);

/// (4 pi int_0^1 (int |u(t,r)|^q dt)^{p/q} r^2 dr)^{1/p}. Time integral by
/// the trapezoid rule over the recorded samples, space by `rule`; q = +inf
/// takes the maximum over samples. Needs >= 16 samples per period 1/N^2.
double mixed_norm(const Trajectory& traj, double p, double q, const QuadratureRule& rule);

enum class Taper { kNone, kSmooth };
std::string to_string(Taper taper);

/// Space-time coefficients over a unit window in the representation
///   u(t, r) = sum_{n,m} f_{n,m} e_n(r) e(-m t),  e(x) = exp(2 pi i x),
/// so the linear solution a e(-n^2 t) sits at m = n^2 (zero modulation).
/// Bins cover the contiguous range m_min .. m_min + m_count - 1.
class SpaceTimeSpectrum {
public:
  SpaceTimeSpectrum() = default;
  SpaceTimeSpectrum(int N, int m_min, int m_count, Taper taper = Taper::kNone);

  int N() const { return N_; }
  int m_min() const { return m_min_; }
  int m_max() const { return m_min_ + m_count_ - 1; }
  int m_count() const { return m_count_; }
  int M_half() const { return std::max(-m_min_, m_max()); }
  Taper taper() const { return taper_; }
  double window_length() const { return 1.0; }

  Complex& at(int n, int m) { return values_[index(n, m)]; }
  const Complex& at(int n, int m) const { return values_[index(n, m)]; }
  /// Zero for (n, m) outside the stored range.
  Complex get(int n, int m) const;
  bool same_shape(const SpaceTimeSpectrum& other) const;

  std::vector<Complex>& values() { return values_; }
  const std::vector<Complex>& values() const { return values_; }

private:
  std::size_t index(int n, int m) const {
    return static_cast<std::size_t>(n - 1) * static_cast<std::size_t>(m_count_) +
           static_cast<std::size_t>(m - m_min_);
  }

  int N_ = 0;
  int m_min_ = 0;
  int m_count_ = 0;
  Taper taper_ = Taper::kNone;
  std::vector<Complex> values_;
};

/// DFT of a_n(t) over the first unit window of `traj`. All S = 1/dt_record
/// bins are kept (m from -(S-1)/2 to S/2), so Parseval is exact with no taper.
/// Needs S >= 8 N^2 so that |m| <= 2 N^2 is represented without aliasing.
SpaceTimeSpectrum spectrum_from_trajectory(const Trajectory& traj, Taper taper = Taper::kNone);

/// Inverse map: samples a_n(t_k), t_k = k/S for k = 0..S (endpoint included).
Trajectory trajectory_from_spectrum(const SpaceTimeSpectrum& spec, int samples);

/// (sum n^{2s} <n^2 - m>^{2b} |f_{n,m}|^2)^{1/2} with <x> = 1 + |x|.
double xsb_norm(const SpaceTimeSpectrum& spec, double s, double b);

struct TripleNormBound {
  double upper = 0.0;
  double part_one_mass = 0.0;  // (sum |a_{n,m}|^2)^{1/2}, first atom family
  double part_two_mass = 0.0;  // (sum |a_n|^2)^{1/2}, second atom family
  std::vector<Complex> second_family;  // a_n, n = 1..N
};

/// Certified upper bound for the window-T atomic norm: an explicit
/// decomposition f = sum a_{n,m} (|n^2-m| + 1/T)^{-1/2} [atom] +
/// sum_{|n^2-m| > 1/T} a_n |n^2-m|^{-1} [atom], returning ||a_{n,m}|| + ||a_n||.
/// The second-family amplitudes follow the weighted ridge least-squares path,
/// minimised over the ridge parameter; a_n = 0 is always a candidate.
TripleNormBound triple_norm_upper(const SpaceTimeSpectrum& spec, double T);

/// Total mass of a concrete decomposition with the given second-family a_n.
TripleNormBound triple_norm_of_decomposition(const SpaceTimeSpectrum& spec, double T,
                                             const std::vector<Complex>& second_family);

/// Keeps modes lo <= n <= hi.
RadialState dyadic_project(const RadialState& state, int lo, int hi);
SpaceTimeSpectrum dyadic_project(const SpaceTimeSpectrum& spec, int lo, int hi);

/// Maximum N^4 * m_count^2 work accepted by trilinear_form.
inline constexpr double kTrilinearWorkLimit = 4e10;

/// sum over m - m1 + m2 - m3 = 0 and all modes of
///   c(n, n1, n2, n3) conj(v) v1 conj(u2) u3,
/// i.e. int_0^1 int_B conj(v) v1 conj(u2) u3 dx dt.
Complex trilinear_form(const SpaceTimeSpectrum& v, const SpaceTimeSpectrum& v1, const SpaceTimeSpectrum& u2,
                       const SpaceTimeSpectrum& u3, const CorrelationTensor& tensor);
Complex trilinear_form(const SpaceTimeSpectrum& v, const SpaceTimeSpectrum& v1, const SpaceTimeSpectrum& u2,
                       const SpaceTimeSpectrum& u3, const TruncatedTensorView& tensor);

/// (1/T) int_0^T ||f(t)||_{L^2}^2 dt, evaluated in closed form.
double window_mean_square(const SpaceTimeSpectrum& spec, double T);

/// window_mean_square / triple_norm_upper^2.
double lemma1_check(const SpaceTimeSpectrum& spec, double T);

/// |sum_{n,m} f_{n,m} g_{n,m}|.
double pairing(const SpaceTimeSpectrum& f, const SpaceTimeSpectrum& g);

}  // namespace ballnls
