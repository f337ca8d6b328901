#pragma once

#include <cmath>
#include <cstdint>

namespace psd {

/// Deterministic generator with fixed algorithms (splitmix64 core,
/// Box-Muller normals) so that identical seeds give byte-identical artifacts
/// on every platform and standard library.
class Rng {
 public:
  explicit Rng(uint64_t seed) : state_(seed) {}

  uint64_t next_u64() {
    uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  /// Uniform in [0, 1).
  double uniform() { return (next_u64() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + uniform() * (hi - lo); }

  /// Uniform integer in [lo, hi] inclusive.
  int64_t uniform_int(int64_t lo, int64_t hi) {
    return lo + static_cast<int64_t>(uniform() * static_cast<double>(hi - lo + 1));
  }

  /// Standard normal via Box-Muller.
  double normal() {
    double u1 = uniform();
    if (u1 < 1e-300) u1 = 1e-300;
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
  }

  /// Independent stream for item `index` under the same master seed.
  static Rng substream(uint64_t seed, uint64_t index) {
    Rng mix(seed ^ (0x5851f42d4c957f2dULL * (index + 1)));
    mix.next_u64();
    return mix;
  }

 private:
  uint64_t state_;
};

}  // namespace psd
