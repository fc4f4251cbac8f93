#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace ballnls {

struct KsResult {
  double statistic = 0.0;
  double critical = 0.0;  // asymptotic 1% critical value
  bool passes() const { return statistic < critical; }
};

/// Two-sample Kolmogorov-Smirnov statistic sup |F_x - F_y| with empirical
/// CDFs F(t) = #{v <= t} / n, against c(0.01) sqrt((m + n) / (m n)).
KsResult ks_two_sample(std::span<const double> x, std::span<const double> y);

inline constexpr double kKsCoefficient1Percent = 1.628;

struct TailFit {
  std::vector<double> lambda_grid;
  std::vector<double> empirical_log_survival;  // log P(X > lambda)
  double fitted_c = 0.0;
  double fitted_kappa = 0.0;
  double c_std_error = 0.0;      // bootstrap
  double kappa_std_error = 0.0;  // bootstrap
};

/// Least squares for log(-log S(lambda)) = log c + kappa log lambda with
/// lambda on `grid_points` equispaced points between the 50th and 99.5th
/// percentiles. Bootstrap error bars use `bootstrap` resamples drawn from
/// RngStream(bootstrap_seed, 0). FitDegenerateError when the range is empty,
/// lambda <= 0 occurs, or the survival curve has no interior points.
TailFit fit_tail(std::span<const double> samples, int grid_points = 40, int bootstrap = 200,
                 std::uint64_t bootstrap_seed = 0);

/// Empirical survival P(X > lambda) at each grid point.
std::vector<double> empirical_survival(std::span<const double> sorted_samples, std::span<const double> grid);

/// Linear-interpolated quantile of sorted data, p in [0, 1].
double quantile_sorted(std::span<const double> sorted, double p);

/// Ordinary least squares slope and intercept of y on x.
struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
};
LineFit fit_line(std::span<const double> x, std::span<const double> y);

}  // namespace ballnls
