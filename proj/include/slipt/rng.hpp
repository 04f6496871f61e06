#pragma once

// Seeded random streams with platform-independent output. std::mt19937_64 is
// bit-specified by the standard; the <random> distributions are not, so the
// uniform and Gaussian transforms are done here.

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

namespace slipt {

constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Seed for the sub-stream identified by (seed, index, tag).
constexpr std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index, std::uint64_t tag = 0) {
  return splitmix64(splitmix64(splitmix64(seed) ^ index) ^ (tag * 0xd1b54a32d192ed03ULL));
}

class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed) : engine_(seed) {}

  /// Uniform in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Standard normal via Box-Muller; the second variate is cached.
  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    const double u1 = 1.0 - uniform();  // (0, 1]
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double t = 2.0 * std::numbers::pi * u2;
    spare_ = r * std::sin(t);
    has_spare_ = true;
    return r * std::cos(t);
  }

 private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace slipt
