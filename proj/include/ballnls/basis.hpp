#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "ballnls/quadrature.hpp"

namespace ballnls {

/// Mode number of a radial Dirichlet eigenfunction, n >= 1.
///
/// Model units: the linear flow multiplies the n-th coefficient by
/// exp(-2*pi*i*n^2*t), so the coefficient ODE carries frequency 2*pi*n^2.
/// Physical time on the unit ball is t_phys = (2/pi) * t_model.
class EigenIndex {
public:
  explicit EigenIndex(int n);
  int value() const { return n_; }
  double frequency() const;

private:
  int n_;
};

/// Model-unit angular frequency 2*pi*n^2 of mode n under the linear flow.
double linear_frequency(int n);

/// e_n(r) = sin(n*pi*r)/r on [0, 1]; the r = 0 value is the limit n*pi.
double eigenfunction_value(EigenIndex n, double r);

/// (4*pi * int_0^1 |e_n(r)|^p r^2 dr)^(1/p). Integration runs over panels
/// aligned with the zeros of e_n so that |.|^p stays smooth per panel.
double eigenfunction_lp_norm(EigenIndex n, double p, const QuadratureRule& rule);

/// <e_m, e_n>_{L^2(B)} = 2*pi*delta_{mn}, evaluated analytically.
double inner_product(EigenIndex m, EigenIndex n);

/// c(n, n1, n2, n3) = int_B e_n e_n1 e_n2 e_n3 dx from the product-to-sum
/// expansion and the sine integral. Symmetric in its arguments.
double correlation(EigenIndex n, EigenIndex n1, EigenIndex n2, EigenIndex n3);

/// Same integral by adaptive Gauss-Kronrod quadrature (independent path).
double correlation_by_quadrature(EigenIndex n, EigenIndex n1, EigenIndex n2, EigenIndex n3,
                                 double tolerance = 1e-12);

/// Fully symmetric quartic correlation tensor, stored as one value per sorted
/// tuple n <= n1 <= n2 <= n3 <= n_max, in lexicographic order.
class CorrelationTensor {
public:
  CorrelationTensor(int n_max, int quad_order, std::vector<double> values, double bound_constant);

  int n_max() const { return n_max_; }
  int quad_order() const { return quad_order_; }
  /// C = max |c| / min(indices) over all stored tuples.
  double bound_constant() const { return bound_constant_; }
  std::span<const double> values() const { return values_; }

  /// Any index order; throws ResolutionError if an index exceeds n_max.
  double operator()(int n, int n1, int n2, int n3) const;

  /// Dense row-major N^4 copy for 1 <= indices <= N, index (n-1)*N^3 + ...
  std::vector<double> dense(int N) const;

  static std::size_t canonical_count(int n_max);
  std::size_t canonical_index(const std::array<int, 4>& sorted) const;

private:
  int n_max_;
  int quad_order_;
  double bound_constant_;
  std::vector<double> values_;
  // prefix_[k][v]: number of sorted tuples whose k-th free slot is below v.
  std::array<std::vector<std::size_t>, 3> prefix_;
};

/// Populates every canonical tuple up to n_max from the closed form. The rule
/// spot-checks the diagonal tuples by quadrature; a rule too coarse for
/// 4*n_max half-waves is a ResolutionError.
CorrelationTensor build_tensor(int n_max, const QuadratureRule& rule);

/// c_K: entries with |n^2 - n1^2 + n2^2 - n3^2| >= 10K read as zero.
class TruncatedTensorView {
public:
  TruncatedTensorView(const CorrelationTensor& base, double K);
  double operator()(int n, int n1, int n2, int n3) const;
  int n_max() const { return base_->n_max(); }
  double threshold() const { return K_; }

private:
  const CorrelationTensor* base_;
  double K_;
};

/// sum_{N2 <= n2 < 2*N2} c(n, n, n2, n2) / n2^2 for dyadic N2.
double sigma_sum(EigenIndex n, int N2, const CorrelationTensor& tensor);

/// |{(a, b) in [0, N]^2 : a^2 + b^2 = ell}| by direct enumeration.
std::int64_t count_circle_representations(std::int64_t ell, std::int64_t N);

}  // namespace ballnls
