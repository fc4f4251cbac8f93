#include "cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <ctime>
#include <functional>
#include <map>
#include <memory>
#include <set>
#include <sstream>

#include "ballnls/error.hpp"
#include "ballnls/experiments.hpp"
#include "ballnls/io.hpp"
#include "ballnls/norms.hpp"
#include "ballnls/rng.hpp"
#include "ballnls/version.hpp"

namespace ballnls::cli {

namespace {

using json = nlohmann::ordered_json;

constexpr int kSchemaVersion = 1;

struct Key {
  std::string name;
  std::string def;
  std::string help;
};

/// Resolved key/value configuration: defaults < config file < flags.
class Config {
public:
  std::map<std::string, std::string> values;

  const std::string& str(const std::string& k) const {
    auto it = values.find(k);
    if (it == values.end()) throw ConfigError("missing configuration key '" + k + "'");
    return it->second;
  }
  double num(const std::string& k) const {
    const std::string& s = str(k);
    if (s == "inf") return std::numeric_limits<double>::infinity();
    try {
      std::size_t pos = 0;
      const double v = std::stod(s, &pos);
      if (pos == s.size()) return v;
    } catch (const std::exception&) {
    }
    throw ConfigError(k + ": '" + s + "' is not a number");
  }
  long integer(const std::string& k) const {
    const std::string& s = str(k);
    try {
      std::size_t pos = 0;
      const long v = std::stol(s, &pos);
      if (pos == s.size()) return v;
    } catch (const std::exception&) {
    }
    throw ConfigError(k + ": '" + s + "' is not an integer");
  }
  std::uint64_t u64(const std::string& k) const {
    const std::string& s = str(k);
    try {
      std::size_t pos = 0;
      if (!s.empty() && s[0] != '-') {
        const auto v = std::stoull(s, &pos);
        if (pos == s.size()) return v;
      }
    } catch (const std::exception&) {
    }
    throw ConfigError(k + ": '" + s + "' is not a non-negative integer");
  }
  std::vector<int> int_list(const std::string& k) const {
    std::vector<int> out;
    std::stringstream ss(str(k));
    std::string item;
    while (std::getline(ss, item, ',')) {
      try {
        std::size_t pos = 0;
        out.push_back(std::stoi(item, &pos));
        if (pos != item.size()) throw std::invalid_argument(item);
      } catch (const std::exception&) {
        throw ConfigError(k + ": '" + item + "' is not an integer");
      }
    }
    if (out.empty()) throw ConfigError(k + ": empty list");
    return out;
  }
};

struct Context {
  std::string command;
  Config cfg;
  std::ostream& out;
  std::ostream& err;
  std::string tensor_hash;
  std::string started;
};

using Handler = std::function<int(Context&)>;

struct Command {
  std::string path;  // "evolve", "experiment ladder", ...
  std::string help;
  std::vector<Key> keys;
  Handler run;
};

/// Keys naming where outputs go; kept out of embedded manifests so a rerun
/// into a different location reproduces the same bytes.
const std::set<std::string> kLocationKeys{"out", "csv", "threads"};

std::string utc_now() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

json manifest_core(const Context& ctx, bool include_locations) {
  json m;
  m["schema_version"] = kSchemaVersion;
  m["command"] = ctx.command;
  json config = json::object();
  for (const auto& [k, v] : ctx.cfg.values)
    if (include_locations || !kLocationKeys.count(k)) config[k] = v;
  m["config_snapshot"] = config;
  if (ctx.cfg.values.count("seed")) {
    m["seed"] = ctx.cfg.u64("seed");
  } else {
    m["seed"] = nullptr;
  }
  m["algorithm_id"] = std::string(RngStream::kAlgorithmId);
  m["artifact_version"] = kArtifactVersion;
  m["tensor_cache_hash"] = ctx.tensor_hash.empty() ? json(nullptr) : json(ctx.tensor_hash);
  return m;
}

fs::path manifest_path(const fs::path& output) {
  fs::path p = output;
  p += ".manifest.json";
  return p;
}

void write_manifest(const Context& ctx, const fs::path& output) {
  json m = manifest_core(ctx, true);
  m["output"] = output.string();
  m["timestamps"] = {{"started", ctx.started}, {"finished", utc_now()}};
  write_file_atomic(manifest_path(output), m.dump(2) + "\n");
}

/// Report JSON with the reproducible part of the manifest embedded.
void write_report(const Context& ctx, const fs::path& path, const std::string& kind, json results) {
  json r;
  r["schema_version"] = kSchemaVersion;
  r["report"] = kind;
  r["manifest"] = manifest_core(ctx, false);
  r["results"] = std::move(results);
  write_file_atomic(path, r.dump(2) + "\n");
  write_manifest(ctx, path);
}

void write_csv(const Context& ctx, const fs::path& path, const std::string& header,
               const std::vector<std::vector<std::string>>& rows) {
  std::string text = header + "\n";
  for (const auto& row : rows) {
    for (std::size_t i = 0; i < row.size(); ++i) text += (i ? "," : "") + row[i];
    text += "\n";
  }
  write_file_atomic(path, text);
  write_manifest(ctx, path);
}

fs::path csv_path(const Context& ctx, const std::string& suffix = "") {
  fs::path p = ctx.cfg.str("out");
  p.replace_extension();
  p += suffix + ".csv";
  return p;
}

std::string fmt(double v) { return format_double(v); }

long long next_pow2(long long v) {
  long long p = 1;
  while (p < v) p <<= 1;
  return p;
}

EnsembleSettings ensemble_settings(const Config& c) {
  EnsembleSettings s;
  s.seed = c.u64("seed");
  s.preset = parse_measure_preset(c.str("preset"));
  s.beta = c.str("beta") == "preset" ? preset_beta(s.preset) : c.num("beta");
  s.max_attempts = c.integer("max_attempts");
  s.integrator = parse_integrator(c.str("integrator"));
  s.dt = c.num("dt");
  s.coupling = c.num("coupling");
  s.threads = static_cast<unsigned>(std::max(0L, c.integer("threads")));
  return s;
}

std::vector<Key> ensemble_keys(const std::string& n, const std::string& samples) {
  return {{"n", n, "truncation N"},
          {"samples", samples, "ensemble size"},
          {"seed", "0", "master seed (member k uses stream k)"},
          {"preset", "derived", "measure preset: derived | paper-literal"},
          {"beta", "preset", "quartic inverse temperature (default: preset value)"},
          {"max_attempts", "100000", "rejection attempts per Gibbs sample"},
          {"integrator", "collocation_rk4", "reference_rk4 | collocation_rk4 | collocation_split"},
          {"dt", "0", "time step (0: min(1e-3, 0.1/(2 pi N^2)))"},
          {"coupling", "1", "nonlinearity coefficient"},
          {"threads", "0", "worker threads (0: hardware concurrency)"}};
}

void warn_reference(Context& ctx, IntegratorMethod m, int N) {
  if (m == IntegratorMethod::kReferenceRk4 && N > kReferenceAdvisoryLimit) {
    ctx.err << "warning: reference integrator with N = " << N << " exceeds the advisory limit of "
            << kReferenceAdvisoryLimit << " (O(N^4) per step)\n";
  }
}

// ---------------------------------------------------------------- commands

int cmd_tensor_build(Context& ctx) {
  const auto& c = ctx.cfg;
  const long n_max = c.integer("n_max");
  if (n_max < 1) throw ConfigError("--n-max must be >= 1");
  long order = c.integer("quad_order");
  if (order == 0) order = default_quad_order(static_cast<int>(n_max));
  if (order < 1) throw ConfigError("--quad-order must be >= 1");
  fs::path out = c.str("out").empty() ? tensor_cache_path(tensor_cache_dir()) : fs::path(c.str("out"));
  const CorrelationTensor t = build_tensor(static_cast<int>(n_max), tensor_rule(static_cast<int>(order)));
  write_tensor_cache(out, t);
  ctx.tensor_hash = file_sha256_hex(out);
  write_manifest(ctx, out);
  ctx.out << "tensor n_max=" << t.n_max() << " quad_order=" << t.quad_order() << " values=" << t.values().size()
          << " C=" << fmt(t.bound_constant()) << " sha256=" << ctx.tensor_hash << " -> " << out.string() << "\n";
  return kOk;
}

int cmd_evolve(Context& ctx) {
  const auto& c = ctx.cfg;
  const long N = c.integer("n");
  if (N < 1) throw ConfigError("--n must be >= 1");
  const double t_end = c.num("t_end");
  if (!(t_end >= 0.0)) throw ConfigError("--t-end must be >= 0");
  IntegratorConfig cfg;
  cfg.method = parse_integrator(c.str("integrator"));
  cfg.coupling = c.num("coupling");
  cfg.nodes_per_oscillation = static_cast<std::size_t>(c.integer("nodes_per_oscillation"));
  double dt_record = c.num("dt_record");
  if (dt_record == 0.0) dt_record = 1.0 / static_cast<double>(next_pow2(16LL * N * N));
  const double dt_req = c.num("dt") > 0.0 ? c.num("dt") : IntegratorConfig::default_dt(static_cast<int>(N));
  cfg.dt = dt_record / std::ceil(dt_record / dt_req * (1.0 - 1e-12));
  const double records = t_end / dt_record;
  if (std::abs(records - std::round(records)) > 1e-9 * std::max(1.0, records)) {
    throw ConfigError("--t-end must be a multiple of dt_record (" + fmt(dt_record) + ")");
  }
  warn_reference(ctx, cfg.method, static_cast<int>(N));

  const MeasurePreset preset = parse_measure_preset(c.str("preset"));
  const FreeMeasureSpec spec = FreeMeasureSpec::preset(preset, static_cast<int>(N));
  const double beta = c.str("beta") == "preset" ? preset_beta(preset) : c.num("beta");
  RngStream rng(c.u64("seed"), 0);
  RadialState init;
  const std::string measure = c.str("measure");
  if (measure == "free") {
    init = sample_free(spec, rng);
  } else if (measure == "gibbs") {
    init = sample_gibbs(spec, beta, rng, c.integer("max_attempts")).state;
  } else {
    throw ConfigError("--measure must be gibbs or free");
  }

  std::unique_ptr<Propagator> prop;
  if (cfg.method == IntegratorMethod::kReferenceRk4) {
    const auto cached = load_or_build_tensor(static_cast<int>(N), default_quad_order(static_cast<int>(N)),
                                             tensor_cache_dir());
    ctx.tensor_hash = cached.digest;
    prop = std::make_unique<Propagator>(static_cast<int>(N), cfg, cached.tensor);
  } else {
    prop = std::make_unique<Propagator>(static_cast<int>(N), cfg);
  }
  const fs::path out = c.str("out");
  try {
    const Trajectory traj = evolve(init, t_end, *prop, dt_record);
    write_trajectory(out, traj);
    write_manifest(ctx, out);
    ctx.out << "evolved N=" << N << " samples=" << traj.size() << " dt=" << fmt(cfg.dt)
            << " dt_record=" << fmt(dt_record) << " -> " << out.string() << "\n";
  } catch (const BlowUpError& e) {
    fs::path partial = out;
    partial += ".partial";
    if (e.partial) {
      write_trajectory(partial, *e.partial);
      write_manifest(ctx, partial);
    }
    ctx.err << "blow-up: " << e.what() << "; partial trajectory kept at " << partial.string() << "\n";
    return kRuntime;
  }
  return kOk;
}

int cmd_invariance(Context& ctx) {
  const auto& c = ctx.cfg;
  const int N = static_cast<int>(c.integer("n"));
  const auto settings = ensemble_settings(c);
  warn_reference(ctx, settings.integrator, N);
  const auto rep = run_invariance(N, c.integer("samples"), c.num("t_compare"), settings);
  json obs = json::array();
  std::vector<std::vector<std::string>> rows;
  std::string failing;
  for (const auto& o : rep.observables) {
    const bool pass = o.statistic < o.critical;
    obs.push_back({{"name", o.name}, {"ks_statistic", o.statistic}, {"critical_1pct", o.critical}, {"pass", pass}});
    rows.push_back({o.name, fmt(o.statistic), fmt(o.critical), pass ? "1" : "0"});
    if (!pass && failing.empty()) failing = o.name;
  }
  json res = {{"N", rep.N},
              {"samples", rep.samples},
              {"t_compare", rep.t_compare},
              {"beta", rep.beta},
              {"preset", to_string(rep.preset)},
              {"acceptance_rate", rep.acceptance_rate},
              {"total_attempts", rep.total_attempts},
              {"max_relative_mass_drift", rep.max_relative_mass_drift},
              {"observables", obs},
              {"pass", rep.passes()}};
  write_report(ctx, c.str("out"), "invariance", res);
  write_csv(ctx, csv_path(ctx), "observable,ks_statistic,critical_1pct,pass", rows);
  for (const auto& r : rows) ctx.out << r[0] << " KS=" << r[1] << " crit=" << r[2] << "\n";
  if (!failing.empty()) {
    ctx.err << "assertion failed: invariance observable '" << failing << "' KS statistic above the 1% critical value\n";
    return kAssertion;
  }
  return kOk;
}

int cmd_tails(Context& ctx) {
  const auto& c = ctx.cfg;
  const int N = static_cast<int>(c.integer("n"));
  const auto settings = ensemble_settings(c);
  TailSettings t;
  t.kind = parse_tail_kind(c.str("kind"));
  const std::string measure = c.str("measure");
  if (measure != "free" && measure != "gibbs") throw ConfigError("--measure must be free or gibbs");
  t.gibbs = measure == "gibbs";
  t.p = c.num("p"), t.q = c.num("q"), t.s = c.num("s"), t.b = c.num("b");
  t.grid_points = static_cast<int>(c.integer("grid_points"));
  t.bootstrap = static_cast<int>(c.integer("bootstrap"));
  const double kappa_min = c.num("kappa_min");
  const auto rep = run_tail_experiment(N, c.integer("samples"), t, settings);
  const bool pass = rep.fit.fitted_kappa >= kappa_min;
  json res = {{"N", rep.N},
              {"samples", rep.samples},
              {"kind", to_string(t.kind)},
              {"measure", measure},
              {"acceptance_rate", rep.acceptance_rate},
              {"lambda_grid", rep.fit.lambda_grid},
              {"empirical_log_survival", rep.fit.empirical_log_survival},
              {"fitted_c", rep.fit.fitted_c},
              {"fitted_kappa", rep.fit.fitted_kappa},
              {"c_std_error", rep.fit.c_std_error},
              {"kappa_std_error", rep.fit.kappa_std_error},
              {"kappa_min", kappa_min},
              {"pass", pass}};
  write_report(ctx, c.str("out"), "tails", res);
  std::vector<std::vector<std::string>> rows;
  for (std::size_t i = 0; i < rep.fit.lambda_grid.size(); ++i)
    rows.push_back({fmt(rep.fit.lambda_grid[i]), fmt(rep.fit.empirical_log_survival[i])});
  write_csv(ctx, csv_path(ctx), "lambda,log_survival", rows);
  ctx.out << "kappa=" << fmt(rep.fit.fitted_kappa) << " +- " << fmt(rep.fit.kappa_std_error)
          << " c=" << fmt(rep.fit.fitted_c) << "\n";
  if (!pass) {
    ctx.err << "assertion failed: tail exponent " << rep.fit.fitted_kappa << " below " << kappa_min << "\n";
    return kAssertion;
  }
  return kOk;
}

int cmd_ladder(Context& ctx) {
  const auto& c = ctx.cfg;
  const auto N_values = c.int_list("n_values");
  for (std::size_t i = 1; i < N_values.size(); ++i) {
    if (N_values[i] <= N_values[i - 1]) throw ConfigError("--n-values must be strictly increasing (no duplicates)");
  }
  LadderSettings st;
  st.s = c.num("s");
  st.t_end = c.num("t_end");
  st.dt = c.num("dt");
  st.dt_record = c.num("dt_record");
  st.integrator = parse_integrator(c.str("integrator"));
  st.preset = parse_measure_preset(c.str("preset"));
  st.coupling = c.num("coupling");
  st.window_c = c.num("window_c");
  st.threads = static_cast<unsigned>(std::max(0L, c.integer("threads")));
  warn_reference(ctx, st.integrator, N_values.back());
  const std::uint64_t seed0 = c.u64("seed");
  const long seeds = c.integer("seeds");
  if (seeds < 1) throw ConfigError("--seeds must be >= 1");
  const double min_pass = c.num("min_pass_fraction");

  json runs = json::array();
  std::vector<std::vector<std::string>> rows;
  long passed = 0;
  for (long k = 0; k < seeds; ++k) {
    const auto lad = run_convergence_ladder(seed0 + static_cast<std::uint64_t>(k), N_values, st);
    const bool pass = lad.strictly_decreasing && lad.fitted_exponent > 0.0;
    passed += pass;
    runs.push_back({{"seed", lad.seed},
                    {"diffs", lad.diffs},
                    {"fitted_exponent", lad.fitted_exponent},
                    {"strictly_decreasing", lad.strictly_decreasing},
                    {"pass", pass},
                    {"dt", lad.dt},
                    {"dt_record", lad.dt_record}});
    for (std::size_t i = 0; i < lad.diffs.size(); ++i)
      rows.push_back({std::to_string(lad.seed), std::to_string(N_values[i]), std::to_string(N_values[i + 1]),
                      fmt(lad.diffs[i])});
    ctx.out << "seed " << lad.seed << " D=";
    for (double d : lad.diffs) ctx.out << fmt(d) << " ";
    ctx.out << "c=" << fmt(lad.fitted_exponent) << (pass ? " pass" : " fail") << "\n";
  }
  const bool ok = static_cast<double>(passed) >= min_pass * static_cast<double>(seeds) - 1e-12;
  json res = {{"N_values", N_values}, {"s", st.s},       {"t_end", st.t_end},
              {"integrator", to_string(st.integrator)}, {"runs", runs},  {"passed", passed},
              {"seeds", seeds},         {"pass", ok}};
  write_report(ctx, c.str("out"), "ladder", res);
  write_csv(ctx, csv_path(ctx), "seed,N,N_next,D", rows);
  if (!ok) {
    ctx.err << "assertion failed: convergence ladder monotone with positive exponent for " << passed << " of "
            << seeds << " seeds\n";
    return kAssertion;
  }
  return kOk;
}

int cmd_blocks(Context& ctx) {
  const auto& c = ctx.cfg;
  const int N = static_cast<int>(c.integer("n"));
  const auto settings = ensemble_settings(c);
  const auto n2 = c.int_list("n2_values");
  int top = N;
  for (int v : n2) top = std::max(top, 2 * v - 1);
  const auto cached = load_or_build_tensor(top, default_quad_order(top), tensor_cache_dir());
  ctx.tensor_hash = cached.digest;
  const long per_window = c.integer("samples_per_window");
  if (per_window < 2) throw ConfigError("--samples-per-window must be >= 2");
  const auto rep = run_block_observables(N, c.integer("samples"), cached.tensor, settings, n2,
                                         1.0 / static_cast<double>(per_window));
  json chaos = json::array();
  for (std::size_t i = 0; i < n2.size(); ++i) chaos.push_back({{"N2", n2[i]}, {"median", rep.chaos_median[i]}});
  bool ok = true;
  const auto i4 = std::find(n2.begin(), n2.end(), 4), i16 = std::find(n2.begin(), n2.end(), 16);
  if (i4 != n2.end() && i16 != n2.end()) {
    ok = rep.chaos_median[i16 - n2.begin()] < 0.5 * rep.chaos_median[i4 - n2.begin()];
  }
  json res = {{"N", N},          {"samples", rep.samples}, {"q", rep.q}, {"block_median", rep.block_median[0]},
              {"chaos", chaos}, {"pass", ok}};
  write_report(ctx, c.str("out"), "blocks", res);
  std::string header = "sample,block_max";
  for (int v : n2) header += ",chaos_N2_" + std::to_string(v);
  std::vector<std::vector<std::string>> rows;
  for (long k = 0; k < rep.samples; ++k) {
    std::vector<std::string> row{std::to_string(k), fmt(rep.block_max[k])};
    for (const auto& v : rep.chaos_deviation) row.push_back(fmt(v[k]));
    rows.push_back(std::move(row));
  }
  write_csv(ctx, csv_path(ctx), header, rows);
  ctx.out << "block median=" << fmt(rep.block_median[0]);
  for (std::size_t i = 0; i < n2.size(); ++i) ctx.out << " chaos[N2=" << n2[i] << "]=" << fmt(rep.chaos_median[i]);
  ctx.out << "\n";
  if (!ok) {
    ctx.err << "assertion failed: chaos observable median at N2=16 not below half the N2=4 median\n";
    return kAssertion;
  }
  return kOk;
}

int parse_clause(const std::string& s) {
  static const std::map<std::string, int> names{{"i", 1},  {"ii", 2},  {"iii", 3}, {"iv", 4},
                                                {"v", 5},  {"vi", 6},  {"vii", 7}, {"viii", 8}};
  if (auto it = names.find(s); it != names.end()) return it->second;
  try {
    std::size_t pos = 0;
    const int v = std::stoi(s, &pos);
    if (pos == s.size() && v >= 1 && v <= 8) return v;
  } catch (const std::exception&) {
  }
  throw ConfigError("--clause must be one of i..viii");
}

int cmd_embeddings(Context& ctx) {
  const auto& c = ctx.cfg;
  EmbeddingParams p = embedding_defaults(parse_clause(c.str("clause")));
  auto override_num = [&](const char* key, double& field) {
    if (c.str(key) != "default") field = c.num(key);
  };
  override_num("p", p.p);
  override_num("q", p.q);
  override_num("s", p.s);
  override_num("b", p.b);
  override_num("epsilon", p.epsilon);
  p = resolve_embedding(p);
  const int N = static_cast<int>(c.integer("n"));
  const int trials = static_cast<int>(c.integer("trials"));
  const int compare = static_cast<int>(c.integer("compare_n"));
  const double decay = c.num("decay");
  const auto seed = c.u64("seed");
  const unsigned threads = static_cast<unsigned>(std::max(0L, c.integer("threads")));
  std::vector<EmbeddingReport> reps{run_embedding_study(p, N, trials, seed, decay, threads)};
  if (compare > 0) reps.push_back(run_embedding_study(p, compare, trials, seed, decay, threads));
  json studies = json::array();
  std::vector<std::vector<std::string>> rows;
  for (const auto& r : reps) {
    studies.push_back({{"N", r.N}, {"max_ratio", r.max_ratio}, {"median_ratio", r.median_ratio}, {"ratios", r.ratios}});
    for (std::size_t k = 0; k < r.ratios.size(); ++k) rows.push_back({std::to_string(r.N), std::to_string(k), fmt(r.ratios[k])});
    ctx.out << "clause (" << clause_name(p.clause) << ") N=" << r.N << " max=" << fmt(r.max_ratio)
            << " median=" << fmt(r.median_ratio) << "\n";
  }
  const bool ok = reps.size() < 2 || reps[1].max_ratio <= 2.0 * reps[0].max_ratio;
  json res = {{"clause", clause_name(p.clause)},
              {"p", p.p},
              {"q", std::isinf(p.q) ? json("inf") : json(p.q)},
              {"s", p.s},
              {"b", p.b},
              {"decay", decay},
              {"trials", trials},
              {"studies", studies},
              {"pass", ok}};
  write_report(ctx, c.str("out"), "embeddings", res);
  write_csv(ctx, csv_path(ctx), "N,trial,ratio", rows);
  if (!ok) {
    ctx.err << "assertion failed: max ratio at N=" << compare << " exceeds twice the max at N=" << N << "\n";
    return kAssertion;
  }
  return kOk;
}

int cmd_norms(Context& ctx) {
  const auto& c = ctx.cfg;
  const Trajectory traj = read_trajectory(c.str("in"));
  const std::string kind = c.str("kind");
  const int N = traj.N();
  std::string header;
  std::vector<std::vector<std::string>> rows;
  if (kind == "hs") {
    const double s = c.num("s");
    header = "t,hs";
    for (const auto& st : traj.states) rows.push_back({fmt(st.time), fmt(hs_norm(st, s))});
  } else if (kind == "mixed") {
    const ModalGrid grid(N);
    header = "p,q,mixed";
    rows.push_back({fmt(c.num("p")), fmt(c.num("q")), fmt(mixed_norm(traj, c.num("p"), c.num("q"), grid.rule()))});
  } else if (kind == "xsb" || kind == "triple") {
    const std::string taper_name = c.str("taper");
    if (taper_name != "none" && taper_name != "hann") throw ConfigError("--taper must be none or hann");
    const auto spec = spectrum_from_trajectory(traj, taper_name == "none" ? Taper::kNone : Taper::kSmooth);
    if (kind == "xsb") {
      const double s = c.num("s"), b = c.num("b");
      header = "n,xsb";
      for (int n = 1; n <= N; ++n) rows.push_back({std::to_string(n), fmt(xsb_norm(dyadic_project(spec, n, n), s, b))});
      rows.push_back({"total", fmt(xsb_norm(spec, s, b))});
    } else {
      const double T = c.num("T");
      const auto tb = triple_norm_upper(spec, T);
      header = "T,upper,part_one_mass,part_two_mass";
      rows.push_back({fmt(T), fmt(tb.upper), fmt(tb.part_one_mass), fmt(tb.part_two_mass)});
    }
  } else {
    throw ConfigError("--kind must be one of hs, mixed, xsb, triple");
  }
  ctx.out << header << "\n";
  for (const auto& r : rows) {
    for (std::size_t i = 0; i < r.size(); ++i) ctx.out << (i ? "," : "") << r[i];
    ctx.out << "\n";
  }
  if (!c.str("csv").empty()) write_csv(ctx, c.str("csv"), header, rows);
  return kOk;
}

std::vector<Command> commands() {
  std::vector<Command> cmds;
  cmds.push_back({"tensor-build",
                  "build the correlation tensor cache",
                  {{"n_max", "", "largest mode index"},
                   {"quad_order", "0", "quadrature panels (0: resolve 4 n_max half-waves)"},
                   {"out", "", "cache file (default: $BALLNLS_CACHE_DIR/tensor.bnls)"}},
                  cmd_tensor_build});
  cmds.push_back({"evolve",
                  "sample initial data and integrate the truncated flow",
                  {{"n", "16", "truncation N"},
                   {"t_end", "1", "final model time"},
                   {"dt", "0", "time step (0: min(1e-3, 0.1/(2 pi N^2)))"},
                   {"dt_record", "0", "record spacing (0: 1/2^k with 2^k >= 16 N^2)"},
                   {"integrator", "collocation_rk4", "reference_rk4 | collocation_rk4 | collocation_split"},
                   {"nodes_per_oscillation", "10", "collocation nodes per oscillation (>= 8)"},
                   {"coupling", "1", "nonlinearity coefficient"},
                   {"seed", "0", "sampler seed"},
                   {"measure", "gibbs", "gibbs | free"},
                   {"preset", "derived", "derived | paper-literal"},
                   {"beta", "preset", "quartic inverse temperature"},
                   {"max_attempts", "100000", "rejection attempts"},
                   {"out", "trajectory.bnlt", "trajectory file"}},
                  cmd_evolve});
  auto inv = ensemble_keys("8", "2000");
  inv.push_back({"t_compare", "0.5", "comparison time"});
  inv.push_back({"out", "invariance.json", "report file (CSV alongside)"});
  cmds.push_back({"experiment invariance", "Gibbs invariance KS test", inv, cmd_invariance});
  auto tails = ensemble_keys("64", "100000");
  tails.insert(tails.end(), {{"kind", "L4_x", "L4_x | mixed | xsb"},
                             {"measure", "free", "free | gibbs"},
                             {"p", "4", "mixed: spatial exponent"},
                             {"q", "4", "mixed: temporal exponent"},
                             {"s", "0", "mixed/xsb: regularity weight n^s"},
                             {"b", "0.45", "xsb: modulation exponent"},
                             {"grid_points", "40", "lambda grid size"},
                             {"bootstrap", "200", "bootstrap resamples"},
                             {"kappa_min", "1.5", "asserted lower bound on the fitted exponent"},
                             {"out", "tails.json", "report file"}});
  cmds.push_back({"experiment tails", "tail fit of a norm under the free or Gibbs measure", tails, cmd_tails});
  cmds.push_back({"experiment ladder",
                  "dyadic convergence ladder with common random numbers",
                  {{"n_values", "8,16,32,64", "strictly increasing dyadic truncations"},
                   {"seed", "0", "first master seed"},
                   {"seeds", "1", "number of consecutive master seeds"},
                   {"min_pass_fraction", "0.9", "fraction of seeds that must pass"},
                   {"s", "0.4", "Sobolev index (< 1/2)"},
                   {"t_end", "0.5", "final model time"},
                   {"dt", "0", "shared time step (0: default for the largest N)"},
                   {"dt_record", "0", "record spacing (0: t_end/64)"},
                   {"integrator", "collocation_split", "integrator"},
                   {"preset", "derived", "measure preset"},
                   {"coupling", "1", "nonlinearity coefficient"},
                   {"window_c", "0", "sub-window constant c (T = c / log N_max); 0 disables"},
                   {"threads", "0", "worker threads"},
                   {"out", "ladder.json", "report file"}},
                  cmd_ladder});
  auto blocks = ensemble_keys("16", "1000");
  blocks.insert(blocks.end(), {{"n2_values", "4,8,16", "dyadic N2 blocks for the chaos observable"},
                               {"samples_per_window", "64", "records per unit window"},
                               {"out", "blocks.json", "report file"}});
  cmds.push_back({"experiment blocks", "dyadic block and centered chaos observables", blocks, cmd_blocks});
  cmds.push_back({"experiment embeddings",
                  "mixed-norm / X^{s,b} ratios over random spectra",
                  {{"clause", "i", "embedding clause i..viii"},
                   {"p", "default", "spatial exponent"},
                   {"q", "default", "temporal exponent"},
                   {"s", "default", "regularity index"},
                   {"b", "default", "modulation exponent"},
                   {"epsilon", "default", "clause (iii) epsilon"},
                   {"n", "32", "spatial cutoff"},
                   {"compare_n", "0", "second cutoff for the trend assertion (0: none)"},
                   {"trials", "100", "random spectra per cutoff"},
                   {"decay", "1", "modulation decay exponent of the random spectra"},
                   {"seed", "0", "seed (trial k uses stream k)"},
                   {"threads", "0", "worker threads"},
                   {"out", "embeddings.json", "report file"}},
                  cmd_embeddings});
  cmds.push_back({"norms",
                  "evaluate norms of a stored trajectory",
                  {{"in", "", "trajectory file"},
                   {"kind", "hs", "hs | mixed | xsb | triple"},
                   {"s", "0", "regularity index"},
                   {"p", "2", "mixed: spatial exponent"},
                   {"q", "2", "mixed: temporal exponent (inf allowed)"},
                   {"b", "0.5", "xsb: modulation exponent"},
                   {"T", "0.25", "triple: window length"},
                   {"taper", "none", "spectrum taper: none | hann"},
                   {"csv", "", "optional CSV output"}},
                  cmd_norms});
  return cmds;
}

std::string flag_name(const std::string& key) {
  std::string f = "--" + key;
  std::replace(f.begin(), f.end(), '_', '-');
  return f;
}

int dispatch(const Command& cmd, std::map<std::string, std::string> file_values,
             const std::map<std::string, std::string>& flag_values, std::ostream& out, std::ostream& err) {
  Context ctx{cmd.path, {}, out, err, "", utc_now()};
  for (const auto& k : cmd.keys) ctx.cfg.values[k.name] = k.def;
  for (const auto& [k, v] : file_values) {
    if (!ctx.cfg.values.count(k)) throw ConfigError("unknown configuration key '" + k + "' for " + cmd.path);
    ctx.cfg.values[k] = v;
  }
  for (const auto& [k, v] : flag_values) ctx.cfg.values[k] = v;
  for (const auto& [k, v] : ctx.cfg.values)
    if (v.empty() && (k == "n_max" || k == "in")) throw ConfigError(flag_name(k) + " is required");
  return cmd.run(ctx);
}

int run_parsed(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  const auto cmds = commands();
  CLI::App app{"Radial cubic NLS Galerkin simulator and Gibbs-measure harness", "ballnls"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kArtifactVersion);

  struct Bound {
    const Command* cmd;
    CLI::App* sub;
    std::map<std::string, CLI::Option*> opts;
    std::shared_ptr<std::map<std::string, std::string>> store;
    std::string config_file;
  };
  std::vector<std::unique_ptr<Bound>> bound;
  CLI::App* experiment = app.add_subcommand("experiment", "statistical experiments");
  experiment->require_subcommand(1);
  for (const auto& cmd : cmds) {
    auto b = std::make_unique<Bound>();
    b->cmd = &cmd;
    b->store = std::make_shared<std::map<std::string, std::string>>();
    const bool nested = cmd.path.rfind("experiment ", 0) == 0;
    const std::string name = nested ? cmd.path.substr(11) : cmd.path;
    b->sub = (nested ? experiment : &app)->add_subcommand(name, cmd.help);
    for (const auto& k : cmd.keys) {
      std::string help = k.help;
      if (!k.def.empty()) help += " [" + k.def + "]";
      b->opts[k.name] = b->sub->add_option(flag_name(k.name), (*b->store)[k.name], help);
    }
    b->sub->add_option("--config", b->config_file, "key = value configuration file");
    bound.push_back(std::move(b));
  }
  std::string manifest_file, rerun_out;
  CLI::App* rerun = app.add_subcommand("rerun", "repeat a run from its manifest");
  rerun->add_option("manifest", manifest_file, "manifest JSON written next to an output")->required();
  rerun->add_option("--out", rerun_out, "output path override");

  std::vector<std::string> rev(args.rbegin(), args.rend() - 1);
  try {
    app.parse(rev);
  } catch (const CLI::ParseError& e) {
    std::ostringstream o, eo;
    const int code = app.exit(e, o, eo);
    out << o.str();
    err << eo.str();
    return code == 0 ? kOk : kUsage;
  }

  if (rerun->parsed()) {
    json m;
    try {
      m = json::parse(std::string(reinterpret_cast<const char*>(read_file(manifest_file).data()),
                                  read_file(manifest_file).size()));
    } catch (const json::exception& e) {
      throw ConfigError(std::string("manifest is not valid JSON: ") + e.what());
    }
    if (!m.contains("command") || !m.contains("config_snapshot")) {
      throw ConfigError("manifest lacks command or config_snapshot");
    }
    const std::string path = m["command"].get<std::string>();
    auto it = std::find_if(cmds.begin(), cmds.end(), [&](const Command& c) { return c.path == path; });
    if (it == cmds.end()) throw ConfigError("manifest names unknown command '" + path + "'");
    std::map<std::string, std::string> values;
    for (const auto& [k, v] : m["config_snapshot"].items()) values[k] = v.get<std::string>();
    std::map<std::string, std::string> flags;
    if (!rerun_out.empty()) flags[path == "norms" ? "csv" : "out"] = rerun_out;
    return dispatch(*it, values, flags, out, err);
  }

  for (const auto& b : bound) {
    if (!b->sub->parsed()) continue;
    std::map<std::string, std::string> file_values;
    if (!b->config_file.empty()) file_values = read_config_file(b->config_file);
    std::map<std::string, std::string> flags;
    for (const auto& [k, opt] : b->opts)
      if (opt->count() > 0) flags[k] = (*b->store)[k];
    return dispatch(*b->cmd, file_values, flags, out, err);
  }
  err << app.help();
  return kUsage;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  try {
    return run_parsed(args, out, err);
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const DomainError& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const PrecisionError& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const Error& e) {
    err << "error (" << e.kind() << "): " << e.what() << "\n";
    return kRuntime;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kRuntime;
  }
}

}  // namespace ballnls::cli
