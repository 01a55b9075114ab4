#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace regen {

constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Seed of substream `index` under master seed `master`. Counter-based, so a
/// replica's stream depends only on (master, index), never on scheduling.
constexpr std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) noexcept {
  return splitmix64(splitmix64(master) ^ splitmix64(index ^ 0x5851f42d4c957f2dULL));
}

inline constexpr const char* kSeedDerivation =
    "replica i draws from mt19937_64 seeded with "
    "splitmix64(splitmix64(seed) ^ splitmix64(i ^ 0x5851f42d4c957f2d))";

/// A randomness stream. Uniforms are built from the raw 64-bit output so that
/// results do not depend on the standard library's distribution classes.
class Stream {
 public:
  explicit Stream(std::uint64_t seed) : engine_(seed) {}

  static Stream substream(std::uint64_t master, std::uint64_t index) {
    return Stream(derive_seed(master, index));
  }

  std::uint64_t bits() { return engine_(); }

  /// Uniform on [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  bool bernoulli(double p) { return uniform() < p; }

  double exponential() { return -std::log1p(-uniform()); }

  std::mt19937_64& engine() { return engine_; }

 private:
  std::mt19937_64 engine_;
};

}  // namespace regen
