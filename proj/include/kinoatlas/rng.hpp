#pragma once

#include <cmath>
#include <cstdint>

#include "kinoatlas/types.hpp"

namespace kinoatlas {

/// Counter-based pseudo-random generator (splitmix64 finalizer over
/// seed + counter). Output sequences depend only on the seed, never on
/// platform library internals, so planner runs are reproducible byte for
/// byte.
class CounterRng {
 public:
  explicit CounterRng(std::uint64_t seed) : seed_(seed * 0x9e3779b97f4a7c15ULL + 0x6a09e667f3bcc909ULL) {}

  std::uint64_t next_u64() {
    std::uint64_t z = seed_ + 0x9e3779b97f4a7c15ULL * ++counter_;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  /// Uniform in [0, 1).
  Scalar uniform01() { return static_cast<Scalar>(next_u64() >> 11) * 0x1.0p-53; }

  Scalar uniform(Scalar a, Scalar b) { return a + (b - a) * uniform01(); }

  /// Uniform integer in [0, n).
  std::uint64_t uniform_index(std::uint64_t n) {
    auto k = static_cast<std::uint64_t>(uniform01() * static_cast<Scalar>(n));
    return k < n ? k : n - 1;
  }

  /// Standard normal via Box-Muller (second value cached).
  Scalar gaussian() {
    if (have_cached_) {
      have_cached_ = false;
      return cached_;
    }
    Scalar u1 = 1.0 - uniform01();  // (0, 1], keeps log finite
    Scalar u2 = uniform01();
    Scalar r = std::sqrt(-2.0 * std::log(u1));
    cached_ = r * std::sin(2.0 * M_PI * u2);
    have_cached_ = true;
    return r * std::cos(2.0 * M_PI * u2);
  }

  /// Uniform over the solid ball of the given radius in `dim` dimensions.
  VectorX uniform_ball(Index dim, Scalar radius) {
    VectorX g(dim);
    Scalar norm = 0.0;
    do {
      for (Index i = 0; i < dim; ++i) g[i] = gaussian();
      norm = g.norm();
    } while (norm == 0.0);
    Scalar r = radius * std::pow(uniform01(), 1.0 / static_cast<Scalar>(dim));
    return (r / norm) * g;
  }

 private:
  std::uint64_t seed_;
  std::uint64_t counter_ = 0;
  Scalar cached_ = 0.0;
  bool have_cached_ = false;
};

}  // namespace kinoatlas
