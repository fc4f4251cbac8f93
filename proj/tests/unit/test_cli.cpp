#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include <cmath>

#include "ballnls/io.hpp"
#include "cli.hpp"

namespace fs = std::filesystem;
using ballnls::cli::run;

namespace {

struct Result {
  int code;
  std::string out, err;
};

Result call(std::vector<std::string> args) {
  args.insert(args.begin(), "ballnls");
  std::ostringstream out, err;
  const int code = run(args, out, err);
  return {code, out.str(), err.str()};
}

fs::path fresh(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("ballnls-cli-" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_SUITE("cli") {
  TEST_CASE("usage errors exit 2") {
    CHECK(call({}).code == 2);
    CHECK(call({"frobnicate"}).code == 2);
    CHECK(call({"evolve", "--no-such-flag", "1"}).code == 2);
    CHECK(call({"evolve", "--n", "abc"}).code == 2);
    CHECK(call({"evolve", "--integrator", "euler"}).code == 2);
    CHECK(call({"experiment", "ladder", "--n-values", "8,16,16"}).code == 2);
    CHECK(call({"experiment", "invariance", "--samples", "10"}).code == 2);
    CHECK(call({"experiment", "embeddings", "--clause", "ix"}).code == 2);
    CHECK(call({"tensor-build"}).code == 2);
    CHECK(call({"--help"}).code == 0);
  }

  TEST_CASE("config file precedence and unknown keys") {
    const auto dir = fresh("config");
    {
      std::ofstream(dir / "ok.cfg") << "n = 4\nt_end = 0.125\nseed = 9\n";
      std::ofstream(dir / "bad.cfg") << "n = 4\nwidth = 3\n";
    }
    const auto out = (dir / "t.bnlt").string();
    auto r = call({"evolve", "--config", (dir / "ok.cfg").string(), "--seed", "2", "--out", out});
    REQUIRE(r.code == 0);
    const auto m = nlohmann::json::parse(slurp(out + ".manifest.json"));
    CHECK(m["config_snapshot"]["n"] == "4");
    CHECK(m["config_snapshot"]["seed"] == "2");
    CHECK(m["seed"] == 2);
    CHECK(m["command"] == "evolve");
    CHECK(m["schema_version"] == 1);
    CHECK(m.contains("timestamps"));
    CHECK(ballnls::read_trajectory(out).N() == 4);
    CHECK(call({"evolve", "--config", (dir / "bad.cfg").string()}).code == 2);
    CHECK(call({"evolve", "--config", (dir / "missing.cfg").string()}).code == 2);
  }

  TEST_CASE("runtime failures exit 3") {
    const auto dir = fresh("runtime");
    CHECK(call({"norms", "--in", (dir / "missing.bnlt").string()}).code == 3);
    const auto out = (dir / "blow.bnlt").string();
    const auto r = call({"evolve", "--n", "2", "--t-end", "1", "--dt", "0.01", "--dt-record", "0.5",
                         "--measure", "free", "--preset", "paper-literal", "--coupling", "1e8", "--out", out});
    CHECK(r.code == 3);
    CHECK(fs::exists(out + ".partial"));
    CHECK_FALSE(fs::exists(out));
  }

  TEST_CASE("failed assertions exit 4 and name the criterion") {
    const auto dir = fresh("assert");
    const auto r = call({"experiment", "tails", "--n", "8", "--samples", "10000", "--bootstrap", "10", "--kappa-min",
                         "10", "--out", (dir / "tails.json").string()});
    CHECK(r.code == 4);
    CHECK(r.err.find("tail exponent") != std::string::npos);
    CHECK(fs::exists(dir / "tails.json"));
    CHECK(fs::exists(dir / "tails.csv"));
  }

  TEST_CASE("norms subcommand") {
    const auto dir = fresh("norms");
    const auto traj = (dir / "t.bnlt").string();
    REQUIRE(call({"evolve", "--n", "4", "--t-end", "1", "--measure", "free", "--out", traj}).code == 0);
    auto r = call({"norms", "--in", traj, "--kind", "xsb", "--csv", (dir / "x.csv").string()});
    CHECK(r.code == 0);
    CHECK(r.out.find("total,") != std::string::npos);
    CHECK(slurp(dir / "x.csv") == r.out);
    CHECK(call({"norms", "--in", traj, "--kind", "triple"}).code == 0);
    CHECK(call({"norms", "--in", traj, "--kind", "mixed", "--q", "inf"}).code == 0);
    CHECK(call({"norms", "--in", traj, "--kind", "sup"}).code == 2);
  }

  TEST_CASE("reference evolve records the tensor hash") {
    const auto dir = fresh("reference");
    setenv(ballnls::kCacheDirEnv, (dir / "cache").c_str(), 1);
    const auto out = (dir / "r.bnlt").string();
    const auto r = call({"evolve", "--n", "4", "--t-end", "0.0625", "--integrator", "reference_rk4", "--out", out});
    unsetenv(ballnls::kCacheDirEnv);
    REQUIRE(r.code == 0);
    const auto m = nlohmann::json::parse(slurp(out + ".manifest.json"));
    CHECK(m["tensor_cache_hash"] == ballnls::file_sha256_hex(dir / "cache" / "tensor.bnls"));
  }

  TEST_CASE("tensor-build output") {
    const auto dir = fresh("tensor");
    const auto a = (dir / "a.bnls").string(), b = (dir / "b.bnls").string();
    REQUIRE(call({"tensor-build", "--n-max", "4", "--out", a}).code == 0);
    REQUIRE(call({"tensor-build", "--n-max", "4", "--out", b}).code == 0);
    CHECK(ballnls::read_tensor_cache(a).values().size() == 35);
    CHECK(slurp(a) == slurp(b));
    CHECK(call({"tensor-build", "--n-max", "0", "--out", a}).code == 2);
  }

  TEST_CASE("evolve edge cases") {
    const auto dir = fresh("evolve");
    const auto a = (dir / "a.bnlt").string(), b = (dir / "b.bnlt").string();
    REQUIRE(call({"evolve", "--n", "4", "--t-end", "0", "--out", a}).code == 0);
    CHECK(ballnls::read_trajectory(a).size() == 1);
    REQUIRE(call({"evolve", "--n", "4", "--t-end", "0.0625", "--seed", "3", "--out", a}).code == 0);
    REQUIRE(call({"evolve", "--n", "4", "--t-end", "0.0625", "--seed", "3", "--out", b}).code == 0);
    CHECK(slurp(a) == slurp(b));
    setenv(ballnls::kCacheDirEnv, (dir / "cache").c_str(), 1);
    const auto r = call({"evolve", "--n", "33", "--t-end", "0", "--integrator", "reference", "--out", b});
    unsetenv(ballnls::kCacheDirEnv);
    CHECK(r.code == 0);
    CHECK(r.err.find("advisory") != std::string::npos);
  }

  TEST_CASE("experiment contract examples") {
    const auto dir = fresh("contract");
    const auto r = call({"experiment", "invariance", "--n", "4", "--samples", "150", "--t-compare", "0", "--out",
                         (dir / "inv.json").string()});
    CHECK(r.code == 0);
    const auto rep = nlohmann::json::parse(slurp(dir / "inv.json"));
    CHECK(rep["schema_version"] == 1);
    for (const auto& o : rep["results"]["observables"]) CHECK(o["ks_statistic"] == 0.0);
    CHECK(call({"experiment", "tails", "--samples", "10"}).code == 2);
  }

  TEST_CASE("norms contract examples") {
    const auto dir = fresh("norms-contract");
    const auto traj = (dir / "t.bnlt").string();
    REQUIRE(call({"evolve", "--n", "4", "--t-end", "1", "--coupling", "0", "--measure", "free", "--out", traj}).code ==
            0);
    const auto t = ballnls::read_trajectory(traj);
    auto r = call({"norms", "--in", traj, "--kind", "hs", "--s", "0"});
    REQUIRE(r.code == 0);
    std::istringstream lines(r.out);
    std::string line;
    std::getline(lines, line);
    for (std::size_t k = 0; std::getline(lines, line); ++k) {
      const double v = std::stod(line.substr(line.find(',') + 1));
      CHECK(std::abs(v - std::sqrt(t.mass_log[k])) < 1e-12);
    }
    r = call({"norms", "--in", traj, "--kind", "xsb", "--s", "0.5"});
    REQUIRE(r.code == 0);
    std::istringstream xs(r.out);
    std::getline(xs, line);
    for (int n = 1; n <= 4; ++n) {
      std::getline(xs, line);
      const double v = std::stod(line.substr(line.find(',') + 1));
      CHECK(v == doctest::Approx(std::sqrt(static_cast<double>(n)) * std::abs(t.states[0][n])).epsilon(1e-10));
    }
    // A foreign unit tag is a configuration error, never reinterpreted.
    auto bytes = ballnls::read_file(traj);
    bytes[20] = 'X';
    ballnls::write_file_atomic(dir / "foreign.bnlt", bytes);
    CHECK(call({"norms", "--in", (dir / "foreign.bnlt").string()}).code == 2);
  }

  TEST_CASE("rerun reproduces bytes") {
    const auto dir = fresh("rerun");
    const auto a = (dir / "a.json").string();
    REQUIRE(call({"experiment", "embeddings", "--n", "4", "--trials", "3", "--seed", "5", "--out", a}).code == 0);
    REQUIRE(call({"rerun", a + ".manifest.json", "--out", (dir / "b.json").string()}).code == 0);
    CHECK(slurp(a) == slurp(dir / "b.json"));
    CHECK(slurp(dir / "a.csv") == slurp(dir / "b.csv"));
    std::ofstream(dir / "junk.json") << "{not json";
    CHECK(call({"rerun", (dir / "junk.json").string()}).code == 2);
  }
}
