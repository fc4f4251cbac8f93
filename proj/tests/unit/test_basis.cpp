#include <doctest.h>

#include <cmath>
#include <numbers>

#include "ballnls/basis.hpp"
#include "ballnls/error.hpp"
#include "ballnls/quadrature.hpp"
#include "ballnls/special.hpp"
#include "oracle.hpp"

using namespace ballnls;
using std::numbers::pi;

TEST_SUITE("basis") {
  TEST_CASE("gauss-legendre integrates polynomials exactly") {
    const auto gl = gauss_legendre(6);
    for (int k = 0; k <= 11; ++k) {
      double acc = 0.0;
      for (std::size_t i = 0; i < gl.nodes.size(); ++i) acc += gl.weights[i] * std::pow(gl.nodes[i], k);
      const double exact = k % 2 ? 0.0 : 2.0 / (k + 1);
      CHECK(acc == doctest::Approx(exact).epsilon(1e-14));
    }
    CHECK_THROWS_AS(gauss_legendre(0), DomainError);
  }

  TEST_CASE("composite rule layout") {
    const QuadratureRule rule(5, 10);
    CHECK(rule.size() == 50);
    CHECK(rule.order() == 5);
    double sum = 0.0;
    for (double w : rule.weights()) sum += w;
    CHECK(sum == doctest::Approx(1.0).epsilon(1e-14));
    // 10 nodes per panel of width 1/5: 8 nodes per period covers 2*50/8 half-waves.
    CHECK(rule.resolved_half_waves() == 12);
    const auto fitted = QuadratureRule::for_half_waves(40);
    CHECK(fitted.resolved_half_waves() >= 40);
    CHECK_THROWS_AS(QuadratureRule(0, 4), DomainError);
    CHECK_THROWS_AS(QuadratureRule::for_half_waves(10, 4), ResolutionError);
  }

  TEST_CASE("sine integral against frozen high-precision values") {
    CHECK(sine_integral(0.0) == 0.0);
    CHECK(sine_integral(1.0) == doctest::Approx(0.94608307036718301494).epsilon(1e-14));
    CHECK(sine_integral(pi) == doctest::Approx(1.8519370519824661704).epsilon(1e-14));
    CHECK(sine_integral(10.0) == doctest::Approx(1.6583475942188740493).epsilon(1e-14));
    CHECK(sine_integral(100.0) == doctest::Approx(1.5622254668890562934).epsilon(1e-14));
    CHECK(sine_integral(-2.0) == doctest::Approx(-sine_integral(2.0)).epsilon(1e-15));
    CHECK(sine_integral(1e6) == doctest::Approx(pi / 2).epsilon(1e-6));
  }

  TEST_CASE("eigenfunctions") {
    CHECK_THROWS_AS(EigenIndex(0), DomainError);
    CHECK(eigenfunction_value(EigenIndex(3), 0.0) == doctest::Approx(3 * pi));
    CHECK(eigenfunction_value(EigenIndex(2), 0.25) == doctest::Approx(4.0));
    CHECK_THROWS_AS(eigenfunction_value(EigenIndex(1), 1.5), DomainError);
    CHECK(linear_frequency(3) == doctest::Approx(18 * pi));
    CHECK(inner_product(EigenIndex(4), EigenIndex(4)) == doctest::Approx(2 * pi));
    CHECK(inner_product(EigenIndex(4), EigenIndex(5)) == 0.0);
  }

  TEST_CASE("eigenfunction Lp norms") {
    const auto rule = QuadratureRule::for_half_waves(64);
    // 4 pi int sin(pi r) r dr = 4 exactly.
    CHECK(eigenfunction_lp_norm(EigenIndex(1), 1.0, rule) == doctest::Approx(4.0).epsilon(1e-12));
    CHECK(eigenfunction_lp_norm(EigenIndex(7), 2.0, rule) == doctest::Approx(std::sqrt(2 * pi)).epsilon(1e-12));
    CHECK(eigenfunction_lp_norm(EigenIndex(3), 4.0, rule) == doctest::Approx(3.0657555105059110929).epsilon(1e-12));
    CHECK(eigenfunction_lp_norm(EigenIndex(2), 3.0, rule) == doctest::Approx(2.5086968001251592003).epsilon(1e-12));
    CHECK(eigenfunction_lp_norm(EigenIndex(5), 6.0, rule) == doctest::Approx(5.1713034439744625432).epsilon(1e-12));
    CHECK_THROWS_AS(eigenfunction_lp_norm(EigenIndex(1), 0.5, rule), DomainError);
  }

  TEST_CASE("correlation closed form against frozen values and the Simpson oracle") {
    struct Row {
      int a, b, c, d;
      double value;
    };
    const Row rows[] = {{1, 1, 1, 1, 26.532298150515045059}, {1, 1, 2, 2, 27.95757503256471467},
                        {2, 2, 3, 3, 58.857896076024135106}, {1, 2, 3, 4, 29.445783391240542625},
                        {5, 7, 9, 11, 153.44318613420814699}, {3, 3, 3, 3, 88.338510090501830654},
                        {1, 1, 1, 3, 1.4252768820496696101}};
    for (const auto& r : rows) {
      CAPTURE(r.a);
      CAPTURE(r.d);
      const double closed = correlation(EigenIndex(r.a), EigenIndex(r.b), EigenIndex(r.c), EigenIndex(r.d));
      CHECK(closed == doctest::Approx(r.value).epsilon(1e-12));
      CHECK(closed == doctest::Approx(oracle::correlation(r.a, r.b, r.c, r.d)).epsilon(1e-9));
      CHECK(correlation_by_quadrature(EigenIndex(r.a), EigenIndex(r.b), EigenIndex(r.c), EigenIndex(r.d)) ==
            doctest::Approx(r.value).epsilon(1e-10));
    }
  }

  TEST_CASE("tensor storage, symmetry and bounds") {
    CHECK(CorrelationTensor::canonical_count(1) == 1);
    CHECK(CorrelationTensor::canonical_count(4) == 35);
    CHECK(CorrelationTensor::canonical_count(10) == 715);
    const auto t = build_tensor(6, QuadratureRule::for_half_waves(24));
    CHECK(t.values().size() == 126);
    CHECK(t(1, 2, 3, 4) == doctest::Approx(29.445783391240542625).epsilon(1e-12));
    CHECK(t(4, 3, 1, 2) == t(1, 2, 3, 4));
    CHECK(t(2, 6, 2, 5) == doctest::Approx(correlation(EigenIndex(2), EigenIndex(2), EigenIndex(5), EigenIndex(6))));
    CHECK_THROWS_AS(t(1, 2, 3, 7), ResolutionError);
    double C = 0.0;
    for (int a = 1; a <= 6; ++a)
      for (int b = a; b <= 6; ++b)
        for (int c = b; c <= 6; ++c)
          for (int d = c; d <= 6; ++d) C = std::max(C, std::abs(t(a, b, c, d)) / a);
    CHECK(t.bound_constant() == doctest::Approx(C));
    const auto dense = t.dense(3);
    CHECK(dense.size() == 81);
    CHECK(dense[(2 * 27) + (0 * 9) + (1 * 3) + 0] == t(3, 1, 2, 1));
    CHECK_THROWS_AS(build_tensor(16, QuadratureRule(2, 10)), ResolutionError);
  }

  TEST_CASE("truncated view and sigma sums") {
    const auto t = build_tensor(8, QuadratureRule::for_half_waves(32));
    const TruncatedTensorView view(t, 1.0);
    // |1 - 4 + 9 - 16| = 10 >= 10K is dropped; resonant tuples survive.
    CHECK(view(1, 2, 3, 4) == 0.0);
    CHECK(view(2, 2, 3, 3) == t(2, 2, 3, 3));
    CHECK(TruncatedTensorView(t, 1.1)(1, 2, 3, 4) == t(1, 2, 3, 4));
    CHECK_THROWS_AS(TruncatedTensorView(t, 0.0), DomainError);
    const double expect = t(3, 3, 4, 4) / 16 + t(3, 3, 5, 5) / 25 + t(3, 3, 6, 6) / 36 + t(3, 3, 7, 7) / 49;
    CHECK(sigma_sum(EigenIndex(3), 4, t) == doctest::Approx(expect));
    CHECK_THROWS_AS(sigma_sum(EigenIndex(3), 3, t), DomainError);
    CHECK_THROWS_AS(sigma_sum(EigenIndex(3), 8, t), ResolutionError);
  }

  TEST_CASE("circle representation counts") {
    auto brute = [](std::int64_t ell, std::int64_t N) {
      std::int64_t c = 0;
      for (std::int64_t a = 0; a <= N; ++a)
        for (std::int64_t b = 0; b <= N; ++b) c += a * a + b * b == ell;
      return c;
    };
    for (std::int64_t ell : {0, 1, 2, 25, 50, 65, 325, 1105, 7})
      CHECK(count_circle_representations(ell, 40) == brute(ell, 40));
    CHECK(count_circle_representations(25, 4) == 2);  // (3,4), (4,3); 5 exceeds N
    CHECK(count_circle_representations(-1, 10) == 0);
    CHECK_THROWS_AS(count_circle_representations(1, -1), DomainError);
  }
}
