// Copyright (c) 2026 voxprior contributors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <Eigen/Core>
#include <cmath>
#include <cstdint>
#include <random>

namespace voxprior {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline std::uint64_t hash_combine(std::uint64_t a, std::uint64_t b) {
  return splitmix64(a ^ (b + 0x9e3779b97f4a7c15ULL + (a << 6) + (a >> 2)));
}

/// Deterministic counter-based uniform in [0,1). Used for per-pixel jitter
/// streams so results do not depend on pixel evaluation order.
inline double hash_unit(std::uint64_t a, std::uint64_t b, std::uint64_t c) {
  return static_cast<double>(splitmix64(hash_combine(hash_combine(a, b), c)) >> 11) *
         0x1.0p-53;
}

/// Seeded generator with hand-rolled distributions. std:: distributions are
/// implementation-defined; these are not, so identical seeds give identical
/// draw sequences wherever the code runs.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(splitmix64(seed)) {}

  std::uint64_t next_u64() { return gen_(); }

  /// Uniform in [0,1).
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Uniform integer in [0, n).
  std::uint64_t integer(std::uint64_t n) {
    // Rejection to remove modulo bias.
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    std::uint64_t v;
    do {
      v = next_u64();
    } while (v >= limit);
    return v % n;
  }

  /// Standard normal via Box-Muller; consumes two uniforms per call.
  double normal() {
    const double u1 = 1.0 - uniform();  // (0,1]
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
  }

  /// Uniform in the solid ball of the given radius (rejection from the cube).
  Eigen::Vector3d in_ball(double radius) {
    Eigen::Vector3d v;
    do {
      v = Eigen::Vector3d(uniform(-1.0, 1.0), uniform(-1.0, 1.0), uniform(-1.0, 1.0));
    } while (v.squaredNorm() > 1.0);
    return v * radius;
  }

  /// Derives an independent stream; the parent advances by one draw.
  Rng fork(std::uint64_t tag) { return Rng(hash_combine(next_u64(), tag)); }

 private:
  std::mt19937_64 gen_;
};

}  // namespace voxprior
