#include "ballnls/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "ballnls/error.hpp"
#include "ballnls/rng.hpp"

namespace ballnls {

KsResult ks_two_sample(std::span<const double> x, std::span<const double> y) {
  if (x.empty() || y.empty()) throw DomainError("ks_two_sample: empty sample");
  std::vector<double> a(x.begin(), x.end()), b(y.begin(), y.end());
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const double m = static_cast<double>(a.size()), n = static_cast<double>(b.size());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  // Step through distinct values; ties advance both CDFs together.
  while (i < a.size() && j < b.size()) {
    const double t = std::min(a[i], b[j]);
    while (i < a.size() && a[i] <= t) ++i;
    while (j < b.size() && b[j] <= t) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / m - static_cast<double>(j) / n));
  }
  KsResult out;
  out.statistic = d;
  out.critical = kKsCoefficient1Percent * std::sqrt((m + n) / (m * n));
  return out;
}

double quantile_sorted(std::span<const double> s, double p) {
  if (s.empty()) throw DomainError("quantile: empty sample");
  const double pos = std::clamp(p, 0.0, 1.0) * static_cast<double>(s.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, s.size() - 1);
  return s[lo] + (pos - static_cast<double>(lo)) * (s[hi] - s[lo]);
}

std::vector<double> empirical_survival(std::span<const double> sorted, std::span<const double> grid) {
  std::vector<double> out;
  out.reserve(grid.size());
  const double n = static_cast<double>(sorted.size());
  for (double l : grid) {
    const auto it = std::upper_bound(sorted.begin(), sorted.end(), l);
    out.push_back(static_cast<double>(sorted.end() - it) / n);
  }
  return out;
}

LineFit fit_line(std::span<const double> x, std::span<const double> y) {
  const std::size_t n = x.size();
  if (n < 2 || y.size() != n) throw FitDegenerateError("fit_line: need at least two points");
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < n; ++i) mx += x[i], my += y[i];
  mx /= n, my /= n;
  double sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < n; ++i) sxx += (x[i] - mx) * (x[i] - mx), sxy += (x[i] - mx) * (y[i] - my);
  if (!(sxx > 0.0)) throw FitDegenerateError("fit_line: abscissae coincide");
  LineFit f;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  return f;
}

namespace {

struct RawFit {
  std::vector<double> grid, log_survival;
  double c = 0.0, kappa = 0.0;
};

RawFit fit_sorted(std::span<const double> sorted, int grid_points) {
  if (grid_points < 2) throw DomainError("fit_tail: need at least two grid points");
  const double lo = quantile_sorted(sorted, 0.5), hi = quantile_sorted(sorted, 0.995);
  if (!(hi > lo)) throw FitDegenerateError("fit_tail: no tail mass between the 50th and 99.5th percentiles");
  if (!(lo > 0.0)) throw FitDegenerateError("fit_tail: median must be positive for a log-log fit");
  RawFit f;
  for (int i = 0; i < grid_points; ++i) f.grid.push_back(lo + (hi - lo) * i / (grid_points - 1));
  const auto surv = empirical_survival(sorted, f.grid);
  std::vector<double> x, y;
  for (std::size_t i = 0; i < surv.size(); ++i) {
    f.log_survival.push_back(surv[i] > 0.0 ? std::log(surv[i]) : -std::numeric_limits<double>::infinity());
    if (surv[i] > 0.0 && surv[i] < 1.0) {
      x.push_back(std::log(f.grid[i]));
      y.push_back(std::log(-std::log(surv[i])));
    }
  }
  if (x.size() < 2) throw FitDegenerateError("fit_tail: survival curve has no interior points");
  const auto line = fit_line(x, y);
  f.kappa = line.slope;
  f.c = std::exp(line.intercept);
  return f;
}

}  // namespace

TailFit fit_tail(std::span<const double> samples, int grid_points, int bootstrap, std::uint64_t bootstrap_seed) {
  std::vector<double> sorted(samples.begin(), samples.end());
  std::sort(sorted.begin(), sorted.end());
  const RawFit base = fit_sorted(sorted, grid_points);
  TailFit out;
  out.lambda_grid = base.grid;
  out.empirical_log_survival = base.log_survival;
  out.fitted_c = base.c;
  out.fitted_kappa = base.kappa;
  if (bootstrap > 1) {
    RngStream rng(bootstrap_seed, 0);
    std::vector<double> resample(sorted.size()), cs, ks;
    for (int b = 0; b < bootstrap; ++b) {
      for (auto& v : resample) v = sorted[rng.next_u64() % sorted.size()];
      std::sort(resample.begin(), resample.end());
      try {
        const RawFit f = fit_sorted(resample, grid_points);
        cs.push_back(f.c);
        ks.push_back(f.kappa);
      } catch (const FitDegenerateError&) {
      }
    }
    auto sd = [](const std::vector<double>& v) {
      if (v.size() < 2) return 0.0;
      double m = 0, s = 0;
      for (double x : v) m += x;
      m /= v.size();
      for (double x : v) s += (x - m) * (x - m);
      return std::sqrt(s / (v.size() - 1));
    };
    out.c_std_error = sd(cs);
    out.kappa_std_error = sd(ks);
  }
  return out;
}

}  // namespace ballnls
