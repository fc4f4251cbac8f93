#include "ballnls/basis.hpp"

#include <algorithm>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <numbers>
#include <string>

#include "ballnls/error.hpp"
#include "ballnls/special.hpp"

namespace ballnls {

namespace {

constexpr double kPi = std::numbers::pi;

// int_0^1 (cos(k*pi*r) - 1) / r^2 dr = 1 - cos(k*pi) - k*pi*Si(k*pi).
double cosine_kernel(int k, double si_k_pi) {
  if (k == 0) return 0.0;
  const double sign = (std::abs(k) % 2 == 0) ? 1.0 : -1.0;
  const double a = kPi * std::abs(k);
  return 1.0 - sign - a * si_k_pi;
}

// The eight cosine frequencies and signs of sin A sin B sin C sin D (times 8).
struct CosineTerms {
  std::array<int, 8> k;
  std::array<int, 8> sign;
};

CosineTerms expand(int a, int b, int c, int d) {
  const int amb = a - b, apb = a + b, cmd = c - d, cpd = c + d;
  return {{amb - cmd, amb + cmd, amb - cpd, amb + cpd, apb - cmd, apb + cmd, apb - cpd, apb + cpd},
          {+1, +1, -1, -1, -1, -1, +1, +1}};
}

// sin(n*pi*r)/r without dividing at r = 0.
double sinc_mode(int n, double r) {
  const double x = n * kPi * r;
  if (std::abs(x) < 1e-8) return n * kPi * (1.0 - x * x / 6.0);
  return std::sin(x) / r;
}

}  // namespace

EigenIndex::EigenIndex(int n) : n_(n) {
  if (n < 1) throw DomainError("EigenIndex: mode number must be >= 1, got " + std::to_string(n));
}

double EigenIndex::frequency() const { return linear_frequency(n_); }

double linear_frequency(int n) { return 2.0 * kPi * static_cast<double>(n) * n; }

double eigenfunction_value(EigenIndex n, double r) {
  if (!(r >= 0.0 && r <= 1.0)) throw DomainError("eigenfunction_value: r outside [0, 1]");
  if (r == 0.0) return n.value() * kPi;
  if (r == 1.0) return 0.0;
  return std::sin(n.value() * kPi * r) / r;
}

double eigenfunction_lp_norm(EigenIndex n, double p, const QuadratureRule& rule) {
  if (!(p >= 1.0)) throw DomainError("eigenfunction_lp_norm: p must be >= 1");
  const int nn = n.value();
  if (static_cast<std::size_t>(nn) > 4 * rule.order()) {
    throw ResolutionError("eigenfunction_lp_norm: mode " + std::to_string(nn) +
                          " exceeds 4 x quadrature order " + std::to_string(rule.order()));
  }
  // Zero-aligned panels [k/n, (k+1)/n], refined to at least the rule's panel count.
  const std::size_t refine = (rule.order() + nn - 1) / nn;
  const std::size_t panels = static_cast<std::size_t>(nn) * std::max<std::size_t>(refine, 1);
  const double width = 1.0 / static_cast<double>(panels);
  double acc = 0.0;
  for (std::size_t k = 0; k < panels; ++k) {
    const double a = width * static_cast<double>(k);
    acc += rule.integrate_on(a, a + width, [&](double r) {
      return std::pow(std::abs(sinc_mode(nn, r)), p) * r * r;
    });
  }
  return std::pow(4.0 * kPi * acc, 1.0 / p);
}

double inner_product(EigenIndex m, EigenIndex n) {
  return m.value() == n.value() ? 2.0 * kPi : 0.0;
}

double correlation(EigenIndex n, EigenIndex n1, EigenIndex n2, EigenIndex n3) {
  std::array<int, 4> idx{n.value(), n1.value(), n2.value(), n3.value()};
  std::sort(idx.begin(), idx.end());
  const CosineTerms t = expand(idx[0], idx[1], idx[2], idx[3]);
  double acc = 0.0;
  for (std::size_t j = 0; j < 8; ++j) {
    const int k = t.k[j];
    acc += t.sign[j] * cosine_kernel(k, sine_integral(kPi * std::abs(k)));
  }
  return 4.0 * kPi * acc / 8.0;
}

double correlation_by_quadrature(EigenIndex n, EigenIndex n1, EigenIndex n2, EigenIndex n3,
                                 double tolerance) {
  const int a = n.value(), b = n1.value(), c = n2.value(), d = n3.value();
  auto integrand = [=](double r) {
    return sinc_mode(a, r) * sinc_mode(b, r) * std::sin(c * kPi * r) * std::sin(d * kPi * r);
  };
  // Tolerance is relative to the L1 norm over the whole interval, so panels
  // with near-total cancellation do not force deep recursion.
  const double acc =
      boost::math::quadrature::gauss_kronrod<double, 61>::integrate(integrand, 0.0, 1.0, 30, tolerance);
  return 4.0 * kPi * acc;
}

CorrelationTensor::CorrelationTensor(int n_max, int quad_order, std::vector<double> values,
                                     double bound_constant)
    : n_max_(n_max),
      quad_order_(quad_order),
      bound_constant_(bound_constant),
      values_(std::move(values)) {
  if (n_max < 1) throw DomainError("CorrelationTensor: n_max must be >= 1");
  if (values_.size() != canonical_count(n_max)) {
    throw StorageError("CorrelationTensor: expected " + std::to_string(canonical_count(n_max)) +
                       " values, got " + std::to_string(values_.size()));
  }
  // Number of sorted k-tuples with all entries in [v, n_max] is C(n_max - v + k, k).
  auto multisets = [n_max](int v, int k) -> std::size_t {
    const std::size_t m = static_cast<std::size_t>(n_max - v + 1);
    if (k == 1) return m;
    if (k == 2) return m * (m + 1) / 2;
    return m * (m + 1) * (m + 2) / 6;
  };
  for (int k = 0; k < 3; ++k) {
    auto& pre = prefix_[k];
    pre.assign(static_cast<std::size_t>(n_max) + 2, 0);
    for (int v = 1; v <= n_max; ++v) pre[v + 1] = pre[v] + multisets(v, 3 - k);
  }
}

std::size_t CorrelationTensor::canonical_count(int n_max) {
  const std::size_t n = static_cast<std::size_t>(n_max);
  return n * (n + 1) * (n + 2) * (n + 3) / 24;
}

std::size_t CorrelationTensor::canonical_index(const std::array<int, 4>& s) const {
  return prefix_[0][s[0]] + (prefix_[1][s[1]] - prefix_[1][s[0]]) +
         (prefix_[2][s[2]] - prefix_[2][s[1]]) + static_cast<std::size_t>(s[3] - s[2]);
}

double CorrelationTensor::operator()(int n, int n1, int n2, int n3) const {
  std::array<int, 4> s{n, n1, n2, n3};
  std::sort(s.begin(), s.end());
  if (s[0] < 1) throw DomainError("CorrelationTensor: index below 1");
  if (s[3] > n_max_) {
    throw ResolutionError("CorrelationTensor: index " + std::to_string(s[3]) + " exceeds n_max " +
                          std::to_string(n_max_));
  }
  return values_[canonical_index(s)];
}

std::vector<double> CorrelationTensor::dense(int N) const {
  if (N > n_max_) {
    throw ResolutionError("CorrelationTensor::dense: N " + std::to_string(N) +
                          " exceeds n_max " + std::to_string(n_max_));
  }
  const std::size_t n = static_cast<std::size_t>(std::max(N, 0));
  std::vector<double> out(n * n * n * n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      for (std::size_t k = 0; k < n; ++k)
        for (std::size_t l = 0; l < n; ++l)
          out[((i * n + j) * n + k) * n + l] = (*this)(int(i + 1), int(j + 1), int(k + 1), int(l + 1));
  return out;
}

CorrelationTensor build_tensor(int n_max, const QuadratureRule& rule) {
  if (n_max < 1) throw DomainError("build_tensor: n_max must be >= 1");
  if (rule.resolved_half_waves() < static_cast<std::size_t>(4 * n_max)) {
    throw ResolutionError("build_tensor: quadrature rule resolves " +
                          std::to_string(rule.resolved_half_waves()) + " half-waves, need " +
                          std::to_string(4 * n_max));
  }
  std::vector<double> kernel(static_cast<std::size_t>(4 * n_max) + 1);
  for (int k = 0; k <= 4 * n_max; ++k) kernel[k] = cosine_kernel(k, sine_integral(kPi * k));

  std::vector<double> values;
  values.reserve(CorrelationTensor::canonical_count(n_max));
  double bound = 0.0;
  for (int a = 1; a <= n_max; ++a)
    for (int b = a; b <= n_max; ++b)
      for (int c = b; c <= n_max; ++c)
        for (int d = c; d <= n_max; ++d) {
          const CosineTerms t = expand(a, b, c, d);
          double acc = 0.0;
          for (std::size_t j = 0; j < 8; ++j) acc += t.sign[j] * kernel[std::abs(t.k[j])];
          const double v = 4.0 * kPi * acc / 8.0;
          values.push_back(v);
          bound = std::max(bound, std::abs(v) / a);
        }

  CorrelationTensor tensor(n_max, static_cast<int>(rule.order()), std::move(values), bound);

  // Diagonal spot check against the rule: 4*pi * sum w * (sin^4 / r^2).
  for (int n = 1; n <= n_max; n *= 2) {
    double acc = 0.0;
    const auto& x = rule.nodes();
    const auto& w = rule.weights();
    for (std::size_t j = 0; j < x.size(); ++j) {
      const double s = sinc_mode(n, x[j]) * std::sin(n * kPi * x[j]);
      acc += w[j] * s * s;
    }
    const double q = 4.0 * kPi * acc;
    const double c = tensor(n, n, n, n);
    if (std::abs(q - c) > 1e-8 * std::max(1.0, std::abs(c))) {
      throw ResolutionError("build_tensor: quadrature spot check failed at n = " + std::to_string(n));
    }
  }
  return tensor;
}

TruncatedTensorView::TruncatedTensorView(const CorrelationTensor& base, double K)
    : base_(&base), K_(K) {
  if (!(K > 0.0)) throw DomainError("TruncatedTensorView: K must be positive");
}

double TruncatedTensorView::operator()(int n, int n1, int n2, int n3) const {
  const long long resonance = 1LL * n * n - 1LL * n1 * n1 + 1LL * n2 * n2 - 1LL * n3 * n3;
  if (std::abs(static_cast<double>(resonance)) >= 10.0 * K_) return 0.0;
  return (*base_)(n, n1, n2, n3);
}

double sigma_sum(EigenIndex n, int N2, const CorrelationTensor& tensor) {
  if (N2 < 1 || (N2 & (N2 - 1)) != 0) throw DomainError("sigma_sum: N2 must be a power of two");
  if (2 * N2 - 1 > tensor.n_max() || n.value() > tensor.n_max()) {
    throw ResolutionError("sigma_sum: block [" + std::to_string(N2) + ", " + std::to_string(2 * N2) +
                          ") or mode exceeds tensor cutoff " + std::to_string(tensor.n_max()));
  }
  double acc = 0.0;
  for (int m = N2; m < 2 * N2; ++m) {
    acc += tensor(n.value(), n.value(), m, m) / (static_cast<double>(m) * m);
  }
  return acc;
}

std::int64_t count_circle_representations(std::int64_t ell, std::int64_t N) {
  if (N < 0) throw DomainError("count_circle_representations: N must be >= 0");
  if (ell < 0) return 0;
  auto isqrt = [](std::int64_t v) {
    auto r = static_cast<std::int64_t>(std::sqrt(static_cast<double>(v)));
    while (r * r > v) --r;
    while ((r + 1) * (r + 1) <= v) ++r;
    return r;
  };
  const std::int64_t top = std::min(N, isqrt(ell));
  std::int64_t count = 0;
  for (std::int64_t a = 0; a <= top; ++a) {
    const std::int64_t rest = ell - a * a;
    const std::int64_t b = isqrt(rest);
    if (b * b == rest && b <= N) ++count;
  }
  return count;
}

}  // namespace ballnls
