#pragma once

#include <cmath>
#include <cstdint>
#include <random>

#include "gidm/types.hpp"

namespace gidm {

/// Seedable generator with stdlib-independent draw semantics, so identical
/// seeds reproduce identical streams across toolchains.
class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed) : engine_(seed) {}

  /// Uniform on [0, 1) with 53 random bits.
  Real uniform() {
    return static_cast<Real>(engine_() >> 11) * 0x1.0p-53;
  }

  Real uniform(Real lo, Real hi) { return lo + (hi - lo) * uniform(); }

  Index uniform_index(Index n) {
    return static_cast<Index>(uniform() * static_cast<Real>(n)) % n;
  }

  /// Standard normal via Box-Muller on the portable uniforms.
  Real gaussian() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    Real u1 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    Real u2 = uniform();
    Real r = std::sqrt(-2.0 * std::log(u1));
    spare_ = r * std::sin(kTwoPi * u2);
    have_spare_ = true;
    return r * std::cos(kTwoPi * u2);
  }

  std::uint64_t raw() { return engine_(); }

  /// Independent child stream; used for per-worker generators.
  static RandomStream substream(std::uint64_t master, std::uint64_t index) {
    return RandomStream(master ^ (0x9E3779B97F4A7C15ull * (index + 1)));
  }

 private:
  std::mt19937_64 engine_;
  Real spare_ = 0.0;
  bool have_spare_ = false;
};

}  // namespace gidm
