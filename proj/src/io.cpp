#include "ballnls/io.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <array>
#include <bit>
#include <cctype>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <sstream>

#include "ballnls/error.hpp"

namespace ballnls {

namespace {

static_assert(std::endian::native == std::endian::little || std::endian::native == std::endian::big);

class Writer {
public:
  void bytes(const void* p, std::size_t n) {
    const auto* c = static_cast<const unsigned char*>(p);
    out.insert(out.end(), c, c + n);
  }
  template <class T>
  void le(T v) {
    unsigned char b[sizeof(T)];
    std::memcpy(b, &v, sizeof(T));
    if constexpr (std::endian::native == std::endian::big) std::reverse(b, b + sizeof(T));
    bytes(b, sizeof(T));
  }
  std::vector<unsigned char> out;
};

class Reader {
public:
  Reader(std::span<const unsigned char> data, const char* what) : data_(data), what_(what) {}
  void bytes(void* p, std::size_t n) {
    if (pos_ + n > data_.size()) throw StorageError(std::string(what_) + ": truncated file");
    std::memcpy(p, data_.data() + pos_, n);
    pos_ += n;
  }
  template <class T>
  T le() {
    unsigned char b[sizeof(T)];
    bytes(b, sizeof(T));
    if constexpr (std::endian::native == std::endian::big) std::reverse(b, b + sizeof(T));
    T v;
    std::memcpy(&v, b, sizeof(T));
    return v;
  }
  std::size_t remaining() const { return data_.size() - pos_; }

private:
  std::span<const unsigned char> data_;
  const char* what_;
  std::size_t pos_ = 0;
};

std::array<unsigned char, 32> sha256(std::span<const unsigned char> bytes) {
  std::array<unsigned char, 32> md{};
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), md.data(), &len, EVP_sha256(), nullptr) != 1 || len != 32) {
    throw StorageError("SHA-256 computation failed");
  }
  return md;
}

std::string hex(std::span<const unsigned char> b) {
  static const char* digits = "0123456789abcdef";
  std::string s;
  for (unsigned char c : b) s += digits[c >> 4], s += digits[c & 15];
  return s;
}

}  // namespace

std::string sha256_hex(std::span<const unsigned char> bytes) { return hex(sha256(bytes)); }

std::string file_sha256_hex(const fs::path& path) { return sha256_hex(read_file(path)); }

std::vector<unsigned char> read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw StorageError("cannot open " + path.string());
  std::vector<unsigned char> data((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (in.bad()) throw StorageError("read failed for " + path.string());
  return data;
}

void write_file_atomic(const fs::path& path, std::span<const unsigned char> bytes) {
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw StorageError("cannot write " + tmp.string());
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    out.flush();
    if (!out) throw StorageError("write failed for " + tmp.string());
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) {
    fs::remove(tmp, ec);
    throw StorageError("cannot move output into place at " + path.string());
  }
}

void write_file_atomic(const fs::path& path, std::string_view text) {
  write_file_atomic(path, std::span(reinterpret_cast<const unsigned char*>(text.data()), text.size()));
}

std::vector<unsigned char> encode_tensor(const CorrelationTensor& t) {
  Writer w;
  w.bytes(kTensorMagic.data(), kTensorMagic.size());
  w.le<std::uint32_t>(kTensorFormatVersion);
  w.le<std::uint32_t>(static_cast<std::uint32_t>(t.n_max()));
  w.le<std::uint32_t>(static_cast<std::uint32_t>(t.quad_order()));
  w.le<double>(t.bound_constant());
  for (double v : t.values()) w.le<double>(v);
  const auto md = sha256(w.out);
  w.bytes(md.data(), md.size());
  return std::move(w.out);
}

CorrelationTensor decode_tensor(std::span<const unsigned char> bytes) {
  if (bytes.size() < 32) throw StorageError("tensor cache: truncated file");
  const auto body = bytes.first(bytes.size() - 32);
  const auto md = sha256(body);
  if (std::memcmp(md.data(), bytes.data() + body.size(), 32) != 0) {
    throw StorageError("tensor cache: digest mismatch (file corrupted)");
  }
  Reader r(body, "tensor cache");
  char magic[8];
  r.bytes(magic, 8);
  if (std::string_view(magic, 8) != kTensorMagic) throw StorageError("tensor cache: bad magic");
  const auto version = r.le<std::uint32_t>();
  if (version != kTensorFormatVersion) {
    throw StorageError("tensor cache: unsupported format version " + std::to_string(version));
  }
  const auto n_max = r.le<std::uint32_t>();
  const auto order = r.le<std::uint32_t>();
  const double C = r.le<double>();
  if (n_max < 1 || n_max > 4096) throw StorageError("tensor cache: implausible n_max");
  const std::size_t count = CorrelationTensor::canonical_count(static_cast<int>(n_max));
  if (r.remaining() != count * 8) throw StorageError("tensor cache: value count does not match n_max");
  std::vector<double> values(count);
  for (auto& v : values) v = r.le<double>();
  return CorrelationTensor(static_cast<int>(n_max), static_cast<int>(order), std::move(values), C);
}

void write_tensor_cache(const fs::path& path, const CorrelationTensor& tensor) {
  if (path.has_parent_path()) {
    std::error_code ec;
    fs::create_directories(path.parent_path(), ec);
    if (ec) throw StorageError("cannot create directory " + path.parent_path().string());
  }
  write_file_atomic(path, encode_tensor(tensor));
}

CorrelationTensor read_tensor_cache(const fs::path& path) { return decode_tensor(read_file(path)); }

fs::path tensor_cache_dir() {
  const char* env = std::getenv(kCacheDirEnv);
  if (env && *env) return fs::path(env);
  return fs::current_path() / ".ballnls-cache";
}

fs::path tensor_cache_path(const fs::path& dir) { return dir / "tensor.bnls"; }

int default_quad_order(int n_max) {
  return static_cast<int>(QuadratureRule::for_half_waves(static_cast<std::size_t>(4 * n_max)).order());
}

QuadratureRule tensor_rule(int quad_order) {
  if (quad_order < 1) throw DomainError("quadrature order must be >= 1");
  return QuadratureRule(static_cast<std::size_t>(quad_order), QuadratureRule::kDefaultNodesPerOscillation);
}

CachedTensor load_or_build_tensor(int n_max, int quad_order, const fs::path& dir) {
  const fs::path path = tensor_cache_path(dir);
  if (fs::exists(path)) {
    CorrelationTensor cached = read_tensor_cache(path);
    if (cached.n_max() >= n_max && cached.quad_order() >= quad_order) {
      return {std::move(cached), path, file_sha256_hex(path), false};
    }
    n_max = std::max(n_max, cached.n_max());
    quad_order = std::max({quad_order, cached.quad_order(), default_quad_order(n_max)});
  }
  CorrelationTensor built = build_tensor(n_max, tensor_rule(quad_order));
  write_tensor_cache(path, built);
  return {std::move(built), path, file_sha256_hex(path), true};
}

std::vector<unsigned char> encode_trajectory(const Trajectory& traj) {
  Writer w;
  const int N = traj.N();
  const std::size_t S = traj.size();
  w.le<std::uint32_t>(static_cast<std::uint32_t>(N));
  w.le<double>(traj.dt_record);
  w.le<std::uint64_t>(S);
  w.bytes(kUnitTag.data(), kUnitTag.size());
  w.le<double>(S ? traj.states.front().time : 0.0);
  for (const auto& st : traj.states) {
    if (st.N() != N) throw StorageError("trajectory: states disagree on N");
    for (const auto& a : st.coeffs) w.le<double>(a.real()), w.le<double>(a.imag());
  }
  if (traj.mass_log.size() != S || traj.energy_log.size() != S) {
    throw StorageError("trajectory: logs not aligned with states");
  }
  for (double m : traj.mass_log) w.le<double>(m);
  for (double e : traj.energy_log) w.le<double>(e);
  return std::move(w.out);
}

Trajectory decode_trajectory(std::span<const unsigned char> bytes) {
  Reader r(bytes, "trajectory");
  const auto N = r.le<std::uint32_t>();
  const double dt = r.le<double>();
  const auto S = r.le<std::uint64_t>();
  char tag[kUnitTag.size()];
  r.bytes(tag, sizeof tag);
  if (std::string_view(tag, sizeof tag) != kUnitTag) {
    throw ConfigError("trajectory: unit tag '" + std::string(tag, sizeof tag) + "' is not '" +
                      std::string(kUnitTag) + "'");
  }
  const double t0 = r.le<double>();
  const std::uint64_t expected = S * (static_cast<std::uint64_t>(N) * 16 + 16);
  if (r.remaining() != expected) throw StorageError("trajectory: length inconsistent with header");
  Trajectory traj;
  traj.dt_record = dt;
  traj.states.reserve(S);
  for (std::uint64_t k = 0; k < S; ++k) {
    RadialState st(static_cast<int>(N), t0 + static_cast<double>(k) * dt);
    for (auto& a : st.coeffs) {
      const double re = r.le<double>();
      a = Complex(re, r.le<double>());
    }
    traj.states.push_back(std::move(st));
  }
  traj.mass_log.resize(S);
  traj.energy_log.resize(S);
  for (auto& m : traj.mass_log) m = r.le<double>();
  for (auto& e : traj.energy_log) e = r.le<double>();
  return traj;
}

void write_trajectory(const fs::path& path, const Trajectory& traj) { write_file_atomic(path, encode_trajectory(traj)); }

Trajectory read_trajectory(const fs::path& path) { return decode_trajectory(read_file(path)); }

std::map<std::string, std::string> parse_config(std::string_view text) {
  std::map<std::string, std::string> out;
  std::istringstream in{std::string(text)};
  std::string line;
  int lineno = 0;
  auto trim = [](std::string s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return std::string();
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
  };
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("config line " + std::to_string(lineno) + ": expected 'key = value'");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) throw ConfigError("config line " + std::to_string(lineno) + ": empty key");
    for (char c : key) {
      if (!std::isalnum(static_cast<unsigned char>(c)) && c != '_' && c != '.' && c != '-') {
        throw ConfigError("config line " + std::to_string(lineno) + ": invalid key '" + key + "'");
      }
    }
    out[key] = value;
  }
  return out;
}

std::map<std::string, std::string> read_config_file(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace ballnls
