#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace bmo {

/// Deterministic helpers on top of mt19937_64. std::uniform_real_distribution
/// and std::normal_distribution are implementation-defined, so tests that
/// freeze values use these instead.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : eng_(seed) {}

  /// Uniform in [0,1).
  double uniform() {
    return double(eng_() >> 11) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Uniform integer in [0, n), n > 0.
  std::uint64_t index(std::uint64_t n) {
    // rejection sampling keeps this exactly uniform
    std::uint64_t limit = std::uint64_t(-1) - std::uint64_t(-1) % n;
    std::uint64_t v;
    do {
      v = eng_();
    } while (v >= limit);
    return v % n;
  }

  /// Standard normal via Box-Muller (one value per call, no cached spare).
  double normal() {
    double u1 = uniform(), u2 = uniform();
    if (u1 <= 0.0) u1 = 0x1.0p-53;
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586477 * u2);
  }

  bool coin(double p = 0.5) { return uniform() < p; }

 private:
  std::mt19937_64 eng_;
};

}  // namespace bmo
