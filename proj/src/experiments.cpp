#include "ballnls/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <memory>
#include <mutex>
#include <numbers>
#include <thread>

#include "ballnls/error.hpp"

namespace ballnls {

namespace {

bool is_power_of_two(long long v) { return v > 0 && (v & (v - 1)) == 0; }

long long next_power_of_two(long long v) {
  long long p = 1;
  while (p < v) p <<= 1;
  return p;
}

/// Largest dt' <= dt that divides `span` into a whole number of steps, that
/// number being a multiple of `records`.
double fit_step(double span, double dt, long records) {
  const double per = span / static_cast<double>(records);
  const double steps = std::max(1.0, std::ceil(per / dt * (1.0 - 1e-12)));
  return per / steps;
}

double median(std::vector<double> v) {
  if (v.empty()) return 0.0;
  std::sort(v.begin(), v.end());
  return quantile_sorted(v, 0.5);
}

double mean_mode_index(const RadialState& s) {
  double num = 0.0, den = 0.0;
  for (int n = 1; n <= s.N(); ++n) {
    num += n * std::norm(s[n]);
    den += std::norm(s[n]);
  }
  return den > 0.0 ? num / den : 0.0;
}

/// Draws one ensemble member: free or Gibbs, member k on stream k.
struct Draw {
  RadialState state;
  long attempts = 1;
};

Draw draw_member(const FreeMeasureSpec& spec, bool gibbs, const EnsembleSettings& settings, std::size_t k,
                 const ModalGrid& grid) {
  RngStream rng(settings.seed, k);
  if (!gibbs) return {sample_free(spec, rng), 1};
  auto g = sample_gibbs(spec, settings.beta, rng, settings.max_attempts, grid);
  return {std::move(g.state), g.attempts};
}

IntegratorConfig make_config(const EnsembleSettings& settings, int N) {
  IntegratorConfig cfg;
  cfg.method = settings.integrator;
  cfg.dt = settings.dt > 0.0 ? settings.dt : IntegratorConfig::default_dt(N);
  cfg.coupling = settings.coupling;
  return cfg;
}

/// Evolves over [0, 1] recorded at S samples per unit time.
Trajectory evolve_unit_window(const RadialState& state, const Propagator& prop, long S) {
  return evolve(state, 1.0, prop, 1.0 / static_cast<double>(S));
}

std::unique_ptr<Propagator> make_propagator(int N, IntegratorConfig cfg, const std::shared_ptr<const ModalGrid>& grid,
                                            const CorrelationTensor* tensor) {
  if (cfg.method == IntegratorMethod::kReferenceRk4) {
    if (tensor) return std::make_unique<Propagator>(N, cfg, *tensor);
    return std::make_unique<Propagator>(N, cfg, build_tensor(N, QuadratureRule::for_half_waves(4 * N)));
  }
  return std::make_unique<Propagator>(N, cfg, grid);
}

}  // namespace

void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body, unsigned threads) {
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, count));
  if (threads <= 1) {
    for (std::size_t k = 0; k < count; ++k) body(k);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr first;
  std::size_t first_index = std::numeric_limits<std::size_t>::max();
  std::mutex mu;
  auto worker = [&] {
    for (std::size_t k; (k = next.fetch_add(1)) < count;) {
      try {
        body(k);
      } catch (...) {
        // Keep the lowest failing index so the reported error is deterministic.
        std::lock_guard<std::mutex> lock(mu);
        if (k < first_index) first_index = k, first = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
  if (first) std::rethrow_exception(first);
}

bool InvarianceReport::passes() const {
  return std::all_of(observables.begin(), observables.end(),
                     [](const ObservableKs& o) { return o.statistic < o.critical; });
}

InvarianceReport run_invariance(int N, long samples, double t_compare, const EnsembleSettings& settings) {
  if (N < 1) throw DomainError("run_invariance: N must be >= 1");
  if (samples < 100) throw PrecisionError("run_invariance: need at least 100 samples");
  if (!(t_compare >= 0.0)) throw DomainError("run_invariance: t_compare must be >= 0");
  const FreeMeasureSpec spec = FreeMeasureSpec::preset(settings.preset, N);
  IntegratorConfig cfg = make_config(settings, N);
  if (t_compare > 0.0) cfg.dt = fit_step(t_compare, cfg.dt, 1);
  auto grid = std::make_shared<const ModalGrid>(N, cfg.nodes_per_oscillation);
  const auto prop = make_propagator(N, cfg, grid, nullptr);

  const std::size_t K = invariance_observable_names().size();
  std::vector<std::vector<double>> before(K, std::vector<double>(samples)), after = before;
  std::vector<long> attempts(samples);
  std::vector<double> drift(samples);
  auto observe = [&](const RadialState& s, std::vector<std::vector<double>>& out, std::size_t k) {
    out[0][k] = grid->quartic_norm(s);
    out[1][k] = s[1].real();
    out[2][k] = std::norm(s[1]);
    out[3][k] = mean_mode_index(s);
  };
  parallel_for(
      static_cast<std::size_t>(samples),
      [&](std::size_t k) {
        Draw d = draw_member(spec, true, settings, k, *grid);
        attempts[k] = d.attempts;
        observe(d.state, before, k);
        if (t_compare == 0.0) {
          observe(d.state, after, k);
          return;
        }
        const Trajectory traj = evolve(d.state, t_compare, *prop, t_compare);
        observe(traj.states.back(), after, k);
        const double m0 = traj.mass_log.front();
        drift[k] = m0 > 0.0 ? std::abs(traj.mass_log.back() - m0) / m0 : 0.0;
      },
      settings.threads);

  InvarianceReport rep;
  rep.N = N;
  rep.samples = samples;
  rep.t_compare = t_compare;
  rep.beta = settings.beta;
  rep.preset = settings.preset;
  for (std::size_t i = 0; i < K; ++i) {
    const KsResult ks = ks_two_sample(before[i], after[i]);
    rep.observables.push_back({invariance_observable_names()[i], ks.statistic, ks.critical});
  }
  for (long a : attempts) rep.total_attempts += a;
  rep.acceptance_rate = static_cast<double>(samples) / static_cast<double>(rep.total_attempts);
  rep.max_relative_mass_drift = *std::max_element(drift.begin(), drift.end());
  return rep;
}

TailKind parse_tail_kind(const std::string& name) {
  if (name == "L4_x" || name == "l4") return TailKind::kL4;
  if (name == "mixed") return TailKind::kMixed;
  if (name == "xsb") return TailKind::kXsb;
  throw ConfigError("unknown tail norm kind '" + name + "' (expected L4_x, mixed or xsb)");
}

std::string to_string(TailKind kind) {
  switch (kind) {
    case TailKind::kL4: return "L4_x";
    case TailKind::kMixed: return "mixed";
    case TailKind::kXsb: return "xsb";
  }
  return "?";
}

TailReport run_tail_experiment(int N, long samples, const TailSettings& tail, const EnsembleSettings& settings) {
  if (N < 1) throw DomainError("run_tail_experiment: N must be >= 1");
  if (samples < 10000) throw PrecisionError("run_tail_experiment: need at least 10^4 samples for tail resolution");
  const FreeMeasureSpec spec = FreeMeasureSpec::preset(settings.preset, N);
  auto grid = std::make_shared<const ModalGrid>(N);
  std::unique_ptr<Propagator> prop;
  const long S = next_power_of_two(16LL * N * N);
  if (tail.kind != TailKind::kL4) {
    IntegratorConfig cfg = make_config(settings, N);
    cfg.dt = fit_step(1.0, cfg.dt, S);
    prop = make_propagator(N, cfg, grid, nullptr);
  }
  TailReport rep;
  rep.settings = tail;
  rep.N = N;
  rep.samples = samples;
  rep.values.assign(static_cast<std::size_t>(samples), 0.0);
  std::vector<long> attempts(samples, 1);
  parallel_for(
      static_cast<std::size_t>(samples),
      [&](std::size_t k) {
        Draw d = draw_member(spec, tail.gibbs, settings, k, *grid);
        attempts[k] = d.attempts;
        switch (tail.kind) {
          case TailKind::kL4: rep.values[k] = std::pow(grid->quartic_norm(d.state), 0.25); break;
          case TailKind::kMixed: {
            Trajectory traj = evolve_unit_window(d.state, *prop, S);
            if (tail.s != 0.0)
              for (auto& st : traj.states)
                for (int n = 1; n <= N; ++n) st[n] *= std::pow(static_cast<double>(n), tail.s);
            rep.values[k] = mixed_norm(traj, tail.p, tail.q, grid->rule());
            break;
          }
          case TailKind::kXsb: {
            const Trajectory traj = evolve_unit_window(d.state, *prop, S);
            rep.values[k] = xsb_norm(spectrum_from_trajectory(traj, Taper::kSmooth), tail.s, tail.b);
            break;
          }
        }
      },
      settings.threads);
  long total = 0;
  for (long a : attempts) total += a;
  rep.acceptance_rate = static_cast<double>(samples) / static_cast<double>(total);
  rep.fit = fit_tail(rep.values, tail.grid_points, tail.bootstrap, settings.seed);
  return rep;
}

double block_observable(const Trajectory& traj, int q) {
  if (q < 1) throw DomainError("block_observable: q must be >= 1");
  const int N = traj.N();
  const std::size_t S = traj.size();
  double best = 0.0;
  for (int M = 1; M <= N; M *= 2) {
    const int hi = std::min(2 * M - 1, N);
    double acc = 0.0;
    for (std::size_t k = 0; k < S; ++k) {
      double m = 0.0;
      for (int n = M; n <= hi; ++n) m += std::norm(traj.states[k][n]);
      const double l2 = std::sqrt(2.0 * std::numbers::pi * m);
      const double w = S == 1 ? 1.0 : ((k == 0 || k + 1 == S) ? 0.5 : 1.0) * traj.dt_record;
      acc += w * std::pow(l2, q);
    }
    best = std::max(best, std::sqrt(static_cast<double>(M)) * std::pow(acc, 1.0 / q));
  }
  return best;
}

double chaos_observable(const Trajectory& traj, const FreeMeasureSpec& spec, int N2, const CorrelationTensor& tensor) {
  if (!is_power_of_two(N2)) throw DomainError("chaos_observable: N2 must be a power of two");
  const int N = traj.N();
  const int top = 2 * N2 - 1;
  if (top > tensor.n_max() || N > tensor.n_max()) {
    throw ResolutionError("chaos_observable: tensor cutoff below max(N, 2 N2 - 1)");
  }
  const std::size_t S = traj.size();
  double best = 0.0;
  for (int n = 1; n <= N; ++n) {
    const double sigma = sigma_sum(EigenIndex(n), N2, tensor);
    double acc = 0.0;
    for (std::size_t k = 0; k < S; ++k) {
      double sum = 0.0;
      for (int n2 = N2; n2 <= top; ++n2) {
        const double sd = n2 <= spec.N ? spec.sigma[n2 - 1] : 0.0;
        const double a2 = n2 <= N ? std::norm(traj.states[k][n2]) : 0.0;
        if (sd > 0.0) sum += tensor(n, n, n2, n2) * (a2 / (sd * sd)) / (static_cast<double>(n2) * n2);
      }
      const double dev = std::abs(sum - sigma);
      const double w = S == 1 ? 1.0 : ((k == 0 || k + 1 == S) ? 0.5 : 1.0) * traj.dt_record;
      acc += w * std::pow(dev, 4);
    }
    best = std::max(best, std::pow(acc, 0.25));
  }
  return best;
}

BlockReport run_block_observables(int N, long samples, const CorrelationTensor& tensor,
                                  const EnsembleSettings& settings, std::vector<int> n2_values, double dt_record) {
  if (N < 1) throw DomainError("run_block_observables: N must be >= 1");
  if (samples < 1000) throw PrecisionError("run_block_observables: need at least 10^3 samples");
  int top = N;
  for (int n2 : n2_values) {
    if (!is_power_of_two(n2)) throw DomainError("run_block_observables: N2 values must be powers of two");
    top = std::max(top, 2 * n2 - 1);
  }
  if (top > tensor.n_max()) throw ResolutionError("run_block_observables: tensor cutoff below max(N, 2 max N2 - 1)");
  const long S = std::lround(1.0 / dt_record);
  if (S < 1 || std::abs(S * dt_record - 1.0) > 1e-12) {
    throw DomainError("run_block_observables: 1/dt_record must be an integer");
  }
  // Modes above N carry sigma_n for the chaos sum but no field.
  const FreeMeasureSpec spec = FreeMeasureSpec::preset(settings.preset, std::max(N, top));
  const FreeMeasureSpec field_spec = FreeMeasureSpec::preset(settings.preset, N);
  IntegratorConfig cfg = make_config(settings, N);
  cfg.dt = fit_step(1.0, cfg.dt, S);
  auto grid = std::make_shared<const ModalGrid>(N, cfg.nodes_per_oscillation);
  const auto prop = make_propagator(N, cfg, grid, &tensor);

  BlockReport rep;
  rep.N = N;
  rep.samples = samples;
  rep.n2_values = n2_values;
  rep.block_max.assign(samples, 0.0);
  rep.chaos_deviation.assign(n2_values.size(), std::vector<double>(samples, 0.0));
  parallel_for(
      static_cast<std::size_t>(samples),
      [&](std::size_t k) {
        Draw d = draw_member(field_spec, false, settings, k, *grid);
        const Trajectory traj = evolve_unit_window(d.state, *prop, S);
        rep.block_max[k] = block_observable(traj, rep.q);
        for (std::size_t i = 0; i < n2_values.size(); ++i)
          rep.chaos_deviation[i][k] = chaos_observable(traj, spec, n2_values[i], tensor);
      },
      settings.threads);
  rep.block_median.push_back(median(rep.block_max));
  for (const auto& v : rep.chaos_deviation) rep.chaos_median.push_back(median(v));
  return rep;
}

double choose_window(int N_star, double c_window) {
  if (N_star < 2) throw DomainError("choose_window: N_star must be >= 2");
  if (!(c_window > 0.0)) throw DomainError("choose_window: c_window must be positive");
  return c_window / std::log(static_cast<double>(N_star));
}

ConvergenceLadder run_convergence_ladder(std::uint64_t seed, std::vector<int> N_values, const LadderSettings& st) {
  if (N_values.size() < 2) throw DomainError("ladder: need at least two truncations");
  for (std::size_t i = 0; i < N_values.size(); ++i) {
    if (!is_power_of_two(N_values[i])) throw DomainError("ladder: N values must be powers of two");
    if (i > 0 && N_values[i] < N_values[i - 1]) throw DomainError("ladder: N values must be increasing");
  }
  if (!(st.s < 0.5)) throw DomainError("ladder: s must be < 1/2");
  if (!(st.t_end > 0.0)) throw DomainError("ladder: t_end must be positive");
  const int n_top = N_values.back();

  ConvergenceLadder out;
  out.seed = seed;
  out.N_values = N_values;
  out.s = st.s;
  out.t_end = st.t_end;
  out.integrator = st.integrator;
  long records = 64;
  if (st.dt_record > 0.0) {
    records = std::lround(st.t_end / st.dt_record);
    if (records < 1 || std::abs(records * st.dt_record - st.t_end) > 1e-9 * st.t_end) {
      throw DomainError("ladder: t_end must be a multiple of dt_record");
    }
  }
  out.dt = fit_step(st.t_end, st.dt > 0.0 ? st.dt : IntegratorConfig::default_dt(n_top), records);
  out.dt_record = st.t_end / static_cast<double>(records);

  // One master draw shared by every truncation.
  RngStream rng(seed, 0);
  std::vector<Complex> g(static_cast<std::size_t>(n_top));
  for (auto& v : g) v = rng.complex_normal();
  const FreeMeasureSpec spec = FreeMeasureSpec::preset(st.preset, n_top);

  long chunk = records;
  if (st.window_c > 0.0) {
    const double T = choose_window(std::max(n_top, 2), st.window_c);
    chunk = std::clamp(static_cast<long>(std::floor(T / out.dt_record)), 1L, records);
  }

  std::vector<Trajectory> runs(N_values.size());
  parallel_for(
      N_values.size(),
      [&](std::size_t i) {
        const int N = N_values[i];
        RadialState init(N);
        for (int n = 1; n <= N; ++n) init[n] = spec.sigma[n - 1] * g[n - 1];
        IntegratorConfig cfg;
        cfg.method = st.integrator;
        cfg.dt = out.dt;
        cfg.coupling = st.coupling;
        try {
          std::unique_ptr<Propagator> prop;
          if (cfg.method == IntegratorMethod::kReferenceRk4) {
            prop = std::make_unique<Propagator>(N, cfg, build_tensor(N, QuadratureRule::for_half_waves(4 * N)));
          } else {
            prop = std::make_unique<Propagator>(N, cfg);
          }
          Trajectory traj;
          RadialState cur = init;
          for (long done = 0; done < records;) {
            const long take = std::min(chunk, records - done);
            const double t1 = static_cast<double>(done + take) * out.dt_record;
            Trajectory piece = evolve(cur, t1, *prop, out.dt_record);
            const std::size_t skip = traj.states.empty() ? 0 : 1;
            for (std::size_t k = skip; k < piece.size(); ++k) {
              traj.states.push_back(std::move(piece.states[k]));
              traj.mass_log.push_back(piece.mass_log[k]);
              traj.energy_log.push_back(piece.energy_log[k]);
            }
            traj.config = piece.config;
            traj.dt_record = out.dt_record;
            cur = traj.states.back();
            done += take;
          }
          runs[i] = std::move(traj);
        } catch (const BlowUpError& err) {
          BlowUpError wrapped("ladder run N=" + std::to_string(N) + ": " + err.what(), err.last_finite);
          wrapped.partial = err.partial;
          throw wrapped;
        }
      },
      st.threads);

  for (std::size_t i = 0; i + 1 < runs.size(); ++i) {
    const Trajectory& lo = runs[i];
    const Trajectory& hi = runs[i + 1];
    double sup = 0.0;
    for (std::size_t k = 0; k < hi.size(); ++k) {
      RadialState diff = hi.states[k];
      for (int n = 1; n <= lo.N(); ++n) diff[n] -= lo.states[k][n];
      sup = std::max(sup, hs_norm(diff, st.s));
    }
    out.diffs.push_back(sup);
  }
  out.strictly_decreasing = true;
  for (std::size_t i = 0; i + 1 < out.diffs.size(); ++i)
    if (!(out.diffs[i + 1] < out.diffs[i])) out.strictly_decreasing = false;
  std::vector<double> x, y;
  for (std::size_t i = 0; i < out.diffs.size(); ++i) {
    if (out.diffs[i] > 0.0) {
      x.push_back(std::log(static_cast<double>(N_values[i])));
      y.push_back(std::log(out.diffs[i]));
    }
  }
  out.fitted_exponent = 0.0;
  if (x.size() >= 2 && x.front() != x.back()) out.fitted_exponent = -fit_line(x, y).slope;
  return out;
}

std::string clause_name(int clause) {
  static const char* names[] = {"i", "ii", "iii", "iv", "v", "vi", "vii", "viii"};
  if (clause < 1 || clause > 8) throw DomainError("embedding clause must be 1..8");
  return names[clause - 1];
}

EmbeddingParams embedding_defaults(int clause) {
  EmbeddingParams p;
  p.clause = clause;
  switch (clause) {
    case 1: p.p = 2.5, p.b = 0.3; break;
    case 2: p.p = 4.0, p.s = 0.3, p.b = 0.55; break;
    case 3: p.b = 0.4, p.epsilon = 0.01; break;
    case 4: p.s = 0.55, p.b = 0.55; break;
    case 5: p.p = 4.0, p.q = 6.0, p.s = 0.45, p.b = 0.55; break;
    case 6: p.p = 3.5, p.q = 4.0, p.s = 0.4, p.b = 0.4; break;
    case 7: p.p = 2.5, p.b = 0.55; break;
    case 8: p.p = 2.5, p.q = 2.2, p.b = 0.4; break;
    default: throw DomainError("embedding clause must be 1..8");
  }
  return resolve_embedding(p);
}

EmbeddingParams resolve_embedding(EmbeddingParams e) {
  auto need = [&](bool ok, const char* what) {
    if (!ok) throw DomainError("embedding clause (" + clause_name(e.clause) + "): requires " + what);
  };
  const double inf = std::numeric_limits<double>::infinity();
  switch (e.clause) {
    case 1:
      e.q = 2.0, e.s = 0.0;
      need(e.p > 2.0 && e.p < 3.0, "2 < p < 3");
      need(e.b > 0.25, "b > 1/4");
      break;
    case 2:
      e.q = 4.0;
      need(e.p > 3.0 && e.p < 6.0, "3 < p < 6");
      need(e.s > 1.0 - 3.0 / e.p, "s > 1 - 3/p");
      need(e.b > 0.5, "b > 1/2");
      break;
    case 3:
      need(e.b > 0.25 && e.b < 0.5, "1/4 < b < 1/2");
      need(e.epsilon > 0.0, "epsilon > 0");
      e.p = 3.0, e.s = e.epsilon, e.q = 4.0 / (3.0 - 4.0 * e.b);
      break;
    case 4:
      e.p = 3.0, e.q = inf;
      need(e.b > 0.5, "b > 1/2");
      need(e.s > 0.5, "s > 1/2");
      break;
    case 5:
      need(e.p >= 3.0 && e.p <= 6.0, "3 <= p <= 6");
      need(e.q >= 4.0, "4 <= q <= inf");
      need(e.s > 1.5 - 3.0 / e.p - (std::isinf(e.q) ? 0.0 : 2.0 / e.q), "s > 3/2 - 3/p - 2/q");
      need(e.b > 0.5, "b > 1/2");
      break;
    case 6: {
      need(e.b > 0.25 && e.b < 0.5, "1/4 < b < 1/2");
      const double d = 3.0 - 4.0 * e.b;
      need(e.p > 3.0 && e.p < 6.0 / d, "3 < p < 6/(3 - 4b)");
      need(e.q > 4.0 / d && !std::isinf(e.q), "4/(3 - 4b) < q < inf");
      need(e.s > 2.5 - 3.0 / e.p - 2.0 / e.q - 2.0 * e.b, "s > 5/2 - 3/p - 2/q - 2b");
      break;
    }
    case 7:
      e.q = e.p, e.s = 0.0;
      need(e.p >= 2.0 && e.p < 8.0 / 3.0, "2 <= p < 8/3");
      need(e.b > 0.5, "b > 1/2");
      break;
    case 8:
      e.s = 0.0;
      need(e.b > 0.25 && e.b < 0.5, "1/4 < b < 1/2");
      need(e.p >= 1.0 && e.p < 24.0 / (4.0 * e.b + 7.0), "1 <= p < 24/(4b + 7)");
      need(e.q >= 1.0 && e.q < 8.0 / (5.0 - 4.0 * e.b), "1 <= q < 8/(5 - 4b)");
      break;
    default: throw DomainError("embedding clause must be 1..8");
  }
  return e;
}

double embedding_ratio(const SpaceTimeSpectrum& spec, const EmbeddingParams& params) {
  const int N = spec.N();
  const long S = next_power_of_two(std::max<long long>(16LL * N * N, spec.m_count()));
  const Trajectory traj = trajectory_from_spectrum(spec, static_cast<int>(S));
  const QuadratureRule rule =
      QuadratureRule::for_half_waves(static_cast<std::size_t>(N), QuadratureRule::kMinNodesPerOscillation);
  const double den = xsb_norm(spec, params.s, params.b);
  if (!(den > 0.0)) throw UndefinedRatioError("embedding_ratio: zero spectrum");
  return mixed_norm(traj, params.p, params.q, rule) / den;
}

EmbeddingReport run_embedding_study(const EmbeddingParams& raw, int N, int trials, std::uint64_t seed, double decay,
                                    unsigned threads) {
  const EmbeddingParams params = resolve_embedding(raw);
  if (N < 1) throw DomainError("run_embedding_study: N must be >= 1");
  if (trials < 1) throw DomainError("run_embedding_study: trials must be >= 1");
  const int half = 2 * N * N;
  EmbeddingReport rep;
  rep.params = params;
  rep.N = N;
  rep.trials = trials;
  rep.decay = decay;
  rep.ratios.assign(static_cast<std::size_t>(trials), 0.0);
  parallel_for(
      static_cast<std::size_t>(trials),
      [&](std::size_t k) {
        RngStream rng(seed, k);
        SpaceTimeSpectrum spec(N, -half, 2 * half + 1);
        for (int n = 1; n <= N; ++n)
          for (int m = -half; m <= half; ++m) {
            const double w = std::pow(1.0 + std::abs(static_cast<double>(n) * n - m), -decay) / n;
            spec.at(n, m) = w * rng.complex_normal();
          }
        rep.ratios[k] = embedding_ratio(spec, params);
      },
      threads);
  rep.max_ratio = *std::max_element(rep.ratios.begin(), rep.ratios.end());
  rep.median_ratio = median(rep.ratios);
  return rep;
}

}  // namespace ballnls
