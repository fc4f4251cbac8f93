#pragma once

#include <array>
#include <complex>
#include <cstdint>
#include <string_view>

namespace ballnls {

/// Counter-free, platform-independent random stream: xoshiro256** seeded
/// through SplitMix64 from (seed, stream_id). Gaussians use Box-Muller so no
/// standard-library distribution (whose output is implementation defined) is
/// involved.
class RngStream {
public:
  static constexpr std::string_view kAlgorithmId = "xoshiro256ss-splitmix64-boxmuller-v1";

  RngStream(std::uint64_t seed, std::uint64_t stream_id);

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream_id() const { return stream_id_; }
  std::string_view algorithm_id() const { return kAlgorithmId; }

  std::uint64_t next_u64();
  /// Uniform on [0, 1) with 53 random bits.
  double uniform();
  /// Standard real normal.
  double normal();
  /// Standard complex normal, E|g|^2 = 1 (real and imaginary parts variance 1/2).
  std::complex<double> complex_normal();

private:
  std::uint64_t seed_;
  std::uint64_t stream_id_;
  std::array<std::uint64_t, 4> s_{};
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace ballnls
