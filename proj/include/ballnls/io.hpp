#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ballnls/basis.hpp"
#include "ballnls/dynamics.hpp"

namespace ballnls {

namespace fs = std::filesystem;

// Tensor cache layout (all little endian):
//   "BBNLS3D1" | u32 version | u32 n_max | u32 quad order | f64 C |
//   f64 values in canonical order | 32-byte SHA-256 of everything before.
inline constexpr std::string_view kTensorMagic = "BBNLS3D1";
inline constexpr std::uint32_t kTensorFormatVersion = 1;

// Trajectory file layout (all little endian):
//   u32 N | f64 dt_record | u64 samples | 16-byte unit tag | f64 t0 |
//   samples * N * (f64 re, f64 im) | samples * f64 mass | samples * f64 energy
inline constexpr std::string_view kUnitTag = "model-units-e2pi";

/// Environment variable naming the tensor cache directory.
inline constexpr const char* kCacheDirEnv = "BALLNLS_CACHE_DIR";

std::string sha256_hex(std::span<const unsigned char> bytes);
std::string file_sha256_hex(const fs::path& path);

std::vector<unsigned char> encode_tensor(const CorrelationTensor& tensor);
CorrelationTensor decode_tensor(std::span<const unsigned char> bytes);

/// Writes via a temporary file and rename. StorageError on failure.
void write_tensor_cache(const fs::path& path, const CorrelationTensor& tensor);
/// Verifies magic, version, length and digest; StorageError on any mismatch.
CorrelationTensor read_tensor_cache(const fs::path& path);

/// $BALLNLS_CACHE_DIR, else ".ballnls-cache" under the working directory.
fs::path tensor_cache_dir();
fs::path tensor_cache_path(const fs::path& dir);

struct CachedTensor {
  CorrelationTensor tensor;
  fs::path path;
  std::string digest;  // hex SHA-256 of the cache file
  bool rebuilt = false;
};

/// Loads the cache in `dir` when it covers (n_max, quad_order); otherwise
/// builds with the larger of the requested and cached parameters and
/// rewrites it. A corrupted cache is a StorageError, never a silent rebuild.
CachedTensor load_or_build_tensor(int n_max, int quad_order, const fs::path& dir);

/// Default panel count for a tensor up to n_max (resolves 4 n_max half-waves).
int default_quad_order(int n_max);
/// Rule used for tensor builds: `quad_order` panels of the default template.
QuadratureRule tensor_rule(int quad_order);

std::vector<unsigned char> encode_trajectory(const Trajectory& traj);
/// Unit tag mismatch is a ConfigError (the units are never reinterpreted);
/// truncation or inconsistent lengths are StorageErrors.
Trajectory decode_trajectory(std::span<const unsigned char> bytes);
void write_trajectory(const fs::path& path, const Trajectory& traj);
Trajectory read_trajectory(const fs::path& path);

/// Writes bytes to `path` through a sibling temporary and rename.
void write_file_atomic(const fs::path& path, std::span<const unsigned char> bytes);
void write_file_atomic(const fs::path& path, std::string_view text);
std::vector<unsigned char> read_file(const fs::path& path);

/// `key = value` lines; '#' starts a comment; blank lines ignored. Keys use
/// [A-Za-z0-9_.-]. ConfigError names the offending line.
std::map<std::string, std::string> parse_config(std::string_view text);
std::map<std::string, std::string> read_config_file(const fs::path& path);

/// Shortest text that round-trips: "%.17g".
std::string format_double(double v);

}  // namespace ballnls
