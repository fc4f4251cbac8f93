#include <doctest.h>

#include <cstdlib>
#include <filesystem>

#include "ballnls/error.hpp"
#include "ballnls/io.hpp"
#include "ballnls/rng.hpp"

using namespace ballnls;

namespace {

fs::path scratch_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("ballnls-test-" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

}  // namespace

TEST_SUITE("io") {
  TEST_CASE("sha256 of known inputs") {
    const std::string abc = "abc";
    CHECK(sha256_hex(std::span(reinterpret_cast<const unsigned char*>(abc.data()), abc.size())) ==
          "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
    CHECK(sha256_hex({}) == "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
  }

  TEST_CASE("tensor cache round trip and corruption") {
    const auto dir = scratch_dir("tensor");
    const auto t = build_tensor(5, tensor_rule(default_quad_order(5)));
    const auto path = dir / "t.bnls";
    write_tensor_cache(path, t);
    const auto back = read_tensor_cache(path);
    CHECK(back.n_max() == 5);
    CHECK(back.quad_order() == t.quad_order());
    CHECK(back.bound_constant() == t.bound_constant());
    CHECK(std::equal(back.values().begin(), back.values().end(), t.values().begin()));
    auto bytes = read_file(path);
    CHECK(std::string(bytes.begin(), bytes.begin() + 8) == "BBNLS3D1");
    bytes[40] ^= 1;
    write_file_atomic(dir / "bad.bnls", bytes);
    CHECK_THROWS_AS(read_tensor_cache(dir / "bad.bnls"), StorageError);
    bytes.resize(20);
    CHECK_THROWS_AS(decode_tensor(bytes), StorageError);
    CHECK_THROWS_AS(read_tensor_cache(dir / "missing.bnls"), StorageError);
  }

  TEST_CASE("load_or_build reuses covering caches and grows otherwise") {
    const auto dir = scratch_dir("cache");
    const auto first = load_or_build_tensor(4, default_quad_order(4), dir);
    CHECK(first.rebuilt);
    const auto again = load_or_build_tensor(3, default_quad_order(3), dir);
    CHECK_FALSE(again.rebuilt);
    CHECK(again.digest == first.digest);
    CHECK(again.tensor.n_max() == 4);
    const auto grown = load_or_build_tensor(6, default_quad_order(6), dir);
    CHECK(grown.rebuilt);
    CHECK(grown.tensor.n_max() == 6);
    CHECK(grown.digest == file_sha256_hex(tensor_cache_path(dir)));
    auto bytes = read_file(tensor_cache_path(dir));
    bytes[bytes.size() - 1] ^= 0xff;
    write_file_atomic(tensor_cache_path(dir), bytes);
    CHECK_THROWS_AS(load_or_build_tensor(2, 2, dir), StorageError);
  }

  TEST_CASE("cache directory from the environment") {
    setenv(kCacheDirEnv, "/tmp/somewhere", 1);
    CHECK(tensor_cache_dir() == fs::path("/tmp/somewhere"));
    unsetenv(kCacheDirEnv);
    CHECK(tensor_cache_dir() == fs::current_path() / ".ballnls-cache");
  }

  TEST_CASE("trajectory round trip") {
    Trajectory traj;
    traj.dt_record = 0.125;
    RngStream rng(1, 0);
    for (int k = 0; k < 4; ++k) {
      RadialState s(3, 0.5 + 0.125 * k);
      for (int n = 1; n <= 3; ++n) s[n] = rng.complex_normal();
      traj.states.push_back(s);
      traj.mass_log.push_back(k);
      traj.energy_log.push_back(-k);
    }
    const auto bytes = encode_trajectory(traj);
    CHECK(bytes.size() == 4 + 8 + 8 + 16 + 8 + 4 * 3 * 16 + 4 * 16);
    const auto back = decode_trajectory(bytes);
    REQUIRE(back.size() == 4);
    CHECK(back.N() == 3);
    CHECK(back.states[2].time == 0.75);
    CHECK(back.states[3].coeffs == traj.states[3].coeffs);
    CHECK(back.energy_log == traj.energy_log);
    auto wrong = bytes;
    wrong[20] = 'X';
    CHECK_THROWS_AS(decode_trajectory(wrong), ConfigError);
    auto cut = bytes;
    cut.pop_back();
    CHECK_THROWS_AS(decode_trajectory(cut), StorageError);
  }

  TEST_CASE("config files") {
    const auto cfg = parse_config("# comment\n n = 16  \n\nt_end=0.5 # trailing\nname = a b\n");
    CHECK(cfg.size() == 3);
    CHECK(cfg.at("n") == "16");
    CHECK(cfg.at("t_end") == "0.5");
    CHECK(cfg.at("name") == "a b");
    CHECK_THROWS_AS(parse_config("novalue\n"), ConfigError);
    CHECK_THROWS_AS(parse_config(" = 3\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("bad key = 3\n"), ConfigError);
    CHECK_THROWS_AS(read_config_file("/nonexistent/x.cfg"), ConfigError);
  }

  TEST_CASE("double formatting round-trips") {
    CHECK(format_double(0.1) == "0.10000000000000001");
    CHECK(std::stod(format_double(1.0 / 3.0)) == 1.0 / 3.0);
  }
}
