#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace threshnet {

/// SplitMix64 finalizer (Steele, Lea, Flood 2014). A bijection on 64-bit words
/// with full avalanche.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z += 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

/// Seed of replicate `index` under `master_seed`:
///   mix64(mix64(master_seed) ^ mix64(index + 0x632BE59BD9B4E019)).
/// Fixed forever; reports depend on it.
constexpr std::uint64_t derive_seed(std::uint64_t master_seed, std::uint64_t index) noexcept {
  return mix64(mix64(master_seed) ^ mix64(index + 0x632BE59BD9B4E019ULL));
}

/// Exclusively owned pseudo-random stream (mt19937_64 underneath).
class RandomStream {
 public:
  using engine_type = std::mt19937_64;

  explicit RandomStream(std::uint64_t seed) : engine_(seed) {}

  static RandomStream for_replicate(std::uint64_t master_seed, std::uint64_t index) {
    return RandomStream(derive_seed(master_seed, index));
  }

  /// Uniform on the open interval (0, 1); 53 random bits, never 0 or 1.
  double uniform01() {
    for (;;) {
      const double u = static_cast<double>(engine_() >> 11) * 0x1.0p-53;
      if (u > 0.0) return u;
    }
  }

  double normal() { return std::normal_distribution<double>(0.0, 1.0)(engine_); }

  std::uint64_t poisson(double mean) {
    if (!(mean > 0.0)) return 0;
    return static_cast<std::uint64_t>(std::poisson_distribution<long long>(mean)(engine_));
  }

  engine_type& engine() noexcept { return engine_; }

 private:
  engine_type engine_;
};

}  // namespace threshnet
