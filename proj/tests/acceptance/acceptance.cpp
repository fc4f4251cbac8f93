// Acceptance driver: one PASS/FAIL line per criterion. Arguments select a
// subset by number (default: all).

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numbers>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "ballnls/basis.hpp"
#include "ballnls/dynamics.hpp"
#include "ballnls/experiments.hpp"
#include "ballnls/grid.hpp"
#include "ballnls/io.hpp"
#include "ballnls/measures.hpp"
#include "ballnls/norms.hpp"
#include "cli.hpp"

using namespace ballnls;
namespace fs = std::filesystem;
using std::numbers::pi;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

struct Criterion {
  int id;
  const char* name;
  double budget_seconds;
  std::function<Outcome()> run;
};

std::string fmt(const char* f, double a) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

RadialState gibbs_initial(int N, std::uint64_t seed) {
  const auto spec = FreeMeasureSpec::preset(MeasurePreset::kDerived, N);
  RngStream rng(seed, 0);
  return sample_gibbs(spec, preset_beta(MeasurePreset::kDerived), rng, 100000).state;
}

Outcome conservation() {
  const int N = 16;
  const auto tensor = build_tensor(N, tensor_rule(default_quad_order(N)));
  IntegratorConfig cfg;
  cfg.method = IntegratorMethod::kReferenceRk4;
  cfg.dt = 1e-4;
  const auto traj = evolve(gibbs_initial(N, 0), 1.0, cfg, tensor, 0.01);
  double dm = 0.0, de = 0.0;
  for (std::size_t k = 0; k < traj.size(); ++k) {
    dm = std::max(dm, std::abs(traj.mass_log[k] - traj.mass_log[0]) / traj.mass_log[0]);
    de = std::max(de, std::abs(traj.energy_log[k] - traj.energy_log[0]) / traj.energy_log[0]);
  }
  return {dm <= 1e-8 && de <= 1e-6, "mass drift " + fmt("%.2e", dm) + ", energy drift " + fmt("%.2e", de)};
}

Outcome cross_validation() {
  const int N = 16;
  const auto tensor = build_tensor(N, tensor_rule(default_quad_order(N)));
  const auto init = gibbs_initial(N, 0);
  IntegratorConfig cfg;
  cfg.dt = 1e-4;
  cfg.method = IntegratorMethod::kReferenceRk4;
  const auto ref = evolve(init, 0.1, cfg, tensor).states.back();
  cfg.method = IntegratorMethod::kCollocationSplit;
  const auto col = evolve(init, 0.1, cfg, QuadratureRule::for_half_waves(4 * N)).states.back();
  double d = 0.0;
  for (int n = 1; n <= N; ++n) d = std::max(d, std::abs(ref[n] - col[n]));
  return {d <= 1e-6, "max |a_ref - a_split| = " + fmt("%.2e", d)};
}

Outcome tensor_dual_path() {
  RngStream rng(2024, 0);
  double worst = 0.0;
  for (int i = 0; i < 1000; ++i) {
    int idx[4];
    for (int& v : idx) v = 1 + static_cast<int>(rng.uniform() * 64);
    const EigenIndex a(idx[0]), b(idx[1]), c(idx[2]), d(idx[3]);
    worst = std::max(worst, std::abs(correlation(a, b, c, d) - correlation_by_quadrature(a, b, c, d)));
  }
  const double C32 = build_tensor(32, tensor_rule(default_quad_order(32))).bound_constant();
  const double C64 = build_tensor(64, tensor_rule(default_quad_order(64))).bound_constant();
  const double drift = std::abs(C64 - C32) / C32;
  return {worst <= 1e-10 && drift <= 0.10, "max |closed - quadrature| = " + fmt("%.2e", worst) + ", C(32) = " +
                                               fmt("%.4f", C32) + ", C(64) = " + fmt("%.4f", C64) +
                                               ", change " + fmt("%.1f%%", 100 * drift)};
}

Outcome gibbs_invariance() {
  EnsembleSettings s;
  s.seed = 0;
  const auto r = run_invariance(8, 2000, 0.5, s);
  std::string d;
  for (const auto& o : r.observables) d += o.name + " " + fmt("%.4f", o.statistic) + ", ";
  d += "critical " + fmt("%.4f", r.observables.front().critical);
  return {r.passes(), d};
}

Outcome convergence_ladder() {
  LadderSettings st;
  int passed = 0;
  std::string d;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto lad = run_convergence_ladder(seed, {8, 16, 32, 64}, st);
    const bool ok = lad.strictly_decreasing && lad.fitted_exponent > 0.0;
    passed += ok;
    d += ok ? "+" : "-";
  }
  return {passed >= 9, std::to_string(passed) + "/10 seeds monotone with c > 0 [" + d + "]"};
}

Outcome eigenfunction_scaling() {
  const auto rule = QuadratureRule::for_half_waves(1024);
  double lo = INFINITY, hi = 0.0;
  for (int n = 16; n <= 512; ++n) {
    const double r = eigenfunction_lp_norm(EigenIndex(n), 4.0, rule) / std::pow(n, 0.25);
    lo = std::min(lo, r);
    hi = std::max(hi, r);
  }
  // Band calibrated once from this sweep (observed [2.3578, 2.3587]).
  const double c1 = 2.30, c2 = 2.42;
  const bool ok = lo >= c1 && hi <= c2 && c2 / c1 <= 1.5;
  return {ok, "ratio range [" + fmt("%.4f", lo) + ", " + fmt("%.4f", hi) + "] in band [2.30, 2.42]"};
}

Outcome l4_tail() {
  EnsembleSettings s;
  s.seed = 0;
  TailSettings t;
  const auto r = run_tail_experiment(64, 100000, t, s);
  return {r.fit.fitted_kappa >= 1.5,
          "kappa = " + fmt("%.3f", r.fit.fitted_kappa) + " +- " + fmt("%.3f", r.fit.kappa_std_error)};
}

Outcome chaos_moment() {
  std::vector<Complex> alpha;
  for (int n = 1; n <= 10; ++n) alpha.emplace_back(1.0 / n, 0.5 / (n * n));
  double l2 = 0.0;
  for (auto a : alpha) l2 += std::norm(a);
  RngStream rng(0, 0);
  const auto est = chaos_moment_ratio(alpha, 4, 100000, rng);
  const double exact = 2 * l2 * l2;
  const double rel = std::abs(est.moment - exact) / exact;
  return {rel <= 0.05, "E|X|^4 = " + fmt("%.5f", est.moment) + " vs " + fmt("%.5f", exact) + ", rel " +
                           fmt("%.2e", rel)};
}

Outcome embeddings() {
  bool ok = true;
  std::string d;
  for (int clause : {1, 3, 7}) {
    const auto p = embedding_defaults(clause);
    const double m32 = run_embedding_study(p, 32, 100, 0).max_ratio;
    const double m64 = run_embedding_study(p, 64, 100, 0).max_ratio;
    ok = ok && std::isfinite(m32) && m64 <= 2.0 * m32;
    d += "(" + clause_name(clause) + ") " + fmt("%.3f", m32) + " -> " + fmt("%.3f", m64) + "; ";
  }
  return {ok, d};
}

Outcome lattice_counts() {
  const std::int64_t N = 1024;
  const std::int64_t L = 2 * N * N;
  // Brute-force oracle: histogram of a^2 + b^2 over [0, N]^2.
  std::vector<std::int32_t> hist(static_cast<std::size_t>(L + 1), 0);
  bool exact = true;
  RngStream rng(10, 0);
  std::vector<std::int64_t> grid(10000);
  for (auto& ell : grid) ell = static_cast<std::int64_t>(rng.uniform() * static_cast<double>(L + 1));
  for (std::int64_t a = 0; a <= N; ++a)
    for (std::int64_t b = 0; b <= N; ++b) ++hist[static_cast<std::size_t>(a * a + b * b)];
  for (auto ell : grid) exact = exact && count_circle_representations(ell, N) == hist[static_cast<std::size_t>(ell)];
  bool growth = true;
  std::string d;
  for (std::int64_t M = 64; M <= N; M *= 2) {
    std::fill(hist.begin(), hist.end(), 0);
    for (std::int64_t a = 0; a <= M; ++a)
      for (std::int64_t b = 0; b <= M; ++b) ++hist[static_cast<std::size_t>(a * a + b * b)];
    const auto it = std::max_element(hist.begin(), hist.begin() + 2 * M * M + 1);
    const std::int64_t ell = it - hist.begin();
    const auto count = count_circle_representations(ell, M);
    exact = exact && count == *it;
    growth = growth && static_cast<double>(count) <= std::pow(static_cast<double>(M), 0.35);
    d += "N=" + std::to_string(M) + ": " + std::to_string(count) + " (bound " + fmt("%.1f", std::pow(M, 0.35)) + ") ";
  }
  return {exact && growth, std::string(exact ? "oracle agrees on 10^4 points; " : "ORACLE MISMATCH; ") + "max counts " + d};
}

Outcome trilinear() {
  const int N = 4;
  const auto tensor = build_tensor(N, QuadratureRule::for_half_waves(4 * N));
  RngStream rng(11, 0);
  auto rnd = [&] {
    SpaceTimeSpectrum s(N, -40, 81);
    for (auto& v : s.values()) v = rng.complex_normal();
    return s;
  };
  const auto v = rnd(), v1 = rnd(), u2 = rnd(), u3 = rnd();
  const Complex spectral = trilinear_form(v, v1, u2, u3, tensor);
  const int S = 512;
  const auto tv = trajectory_from_spectrum(v, S), t1 = trajectory_from_spectrum(v1, S),
             t2 = trajectory_from_spectrum(u2, S), t3 = trajectory_from_spectrum(u3, S);
  const ModalGrid g(N);
  const auto& r = g.rule().nodes();
  const auto& w = g.rule().weights();
  Complex phys{};
  for (int k = 0; k < S; ++k) {
    const auto a = g.synthesize(tv.states[k]), b = g.synthesize(t1.states[k]), c = g.synthesize(t2.states[k]),
               d = g.synthesize(t3.states[k]);
    for (std::size_t j = 0; j < g.size(); ++j)
      phys += 4 * pi * w[j] * std::conj(a[j]) * b[j] * std::conj(c[j]) * d[j] / (r[j] * r[j]) / double(S);
  }
  const double rel = std::abs(spectral - phys) / std::abs(phys);
  return {rel <= 1e-6, "relative difference " + fmt("%.2e", rel)};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Outcome reproducibility() {
  const fs::path dir = fs::temp_directory_path() / "ballnls-acceptance-repro";
  fs::remove_all(dir);
  fs::create_directories(dir);
  setenv(kCacheDirEnv, (dir / "cache").c_str(), 1);
  auto call = [](std::vector<std::string> args) {
    args.insert(args.begin(), "ballnls");
    std::ostringstream out, err;
    return cli::run(args, out, err);
  };
  const auto p = [&](const char* name) { return (dir / name).string(); };
  struct Job {
    std::vector<std::string> args;
    std::string first, second;
  };
  const std::vector<Job> jobs{
      {{"tensor-build", "--n-max", "12", "--out", p("t1.bnls")}, "t1.bnls", "t2.bnls"},
      {{"evolve", "--n", "8", "--t-end", "0.25", "--seed", "4", "--out", p("e1.bnlt")}, "e1.bnlt", "e2.bnlt"},
      {{"evolve", "--n", "6", "--t-end", "0.125", "--integrator", "reference_rk4", "--seed", "4", "--out",
        p("r1.bnlt")},
       "r1.bnlt", "r2.bnlt"},
      {{"experiment", "embeddings", "--n", "8", "--trials", "5", "--seed", "3", "--out", p("m1.json")}, "m1.json",
       "m2.json"},
      {{"experiment", "invariance", "--n", "4", "--samples", "200", "--t-compare", "0.125", "--out", p("i1.json")},
       "i1.json", "i2.json"},
  };
  bool ok = true;
  int compared = 0;
  for (const auto& job : jobs) {
    if (call(job.args) != cli::kOk) return {false, "command failed: " + job.args[0]};
    if (call({"rerun", p(job.first.c_str()) + ".manifest.json", "--out", p(job.second.c_str())}) != cli::kOk) {
      return {false, "rerun failed: " + job.args[0]};
    }
    ok = ok && slurp(dir / job.first) == slurp(dir / job.second);
    ++compared;
    fs::path csv1 = dir / job.first, csv2 = dir / job.second;
    csv1.replace_extension(".csv");
    csv2.replace_extension(".csv");
    if (fs::exists(csv1)) {
      ok = ok && slurp(csv1) == slurp(csv2);
      ++compared;
    }
  }
  const std::string traj = p("e1.bnlt");
  if (call({"norms", "--in", traj, "--kind", "mixed", "--p", "4", "--q", "4", "--csv", p("n1.csv")}) != cli::kOk ||
      call({"rerun", p("n1.csv") + ".manifest.json", "--out", p("n2.csv")}) != cli::kOk) {
    return {false, "norms failed"};
  }
  ok = ok && slurp(dir / "n1.csv") == slurp(dir / "n2.csv");
  ++compared;
  unsetenv(kCacheDirEnv);
  return {ok, std::to_string(compared) + " output files byte-identical on rerun"};
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<Criterion> criteria{
      {1, "conservation", 120, conservation},
      {2, "integrator cross-validation", 120, cross_validation},
      {3, "tensor dual-path agreement", 300, tensor_dual_path},
      {4, "Gibbs invariance", 600, gibbs_invariance},
      {5, "convergence ladder", 1800, convergence_ladder},
      {6, "eigenfunction scaling", 60, eigenfunction_scaling},
      {7, "L4 tail exponent", 300, l4_tail},
      {8, "chaos fourth moment", 60, chaos_moment},
      {9, "embedding stability", 600, embeddings},
      {10, "lattice counts", 120, lattice_counts},
      {11, "trilinear form", 60, trilinear},
      {12, "reproducibility", 60, reproducibility},
  };
  std::set<int> selected;
  for (int i = 1; i < argc; ++i) selected.insert(std::atoi(argv[i]));
  int failures = 0;
  for (const auto& c : criteria) {
    if (!selected.empty() && !selected.count(c.id)) continue;
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const bool in_time = secs <= c.budget_seconds;
    const bool pass = o.pass && in_time;
    failures += !pass;
    std::printf("%s [%d] %s: %s (%.1f s of %.0f s%s)\n", pass ? "PASS" : "FAIL", c.id, c.name, o.detail.c_str(),
                secs, c.budget_seconds, in_time ? "" : ", over budget");
    std::fflush(stdout);
  }
  return failures == 0 ? 0 : 1;
}
