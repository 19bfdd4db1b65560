#pragma once

#include "conlearn/types.hpp"

#include <cmath>
#include <cstdint>
#include <random>

namespace conlearn {

/// SplitMix64 mix; used to derive independent stream seeds from (seed, stream id).
inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Seedable PRNG with a fixed, platform-independent algorithm: mt19937_64 for
/// the bit stream and the Marsaglia polar method for normals. std::*_distribution
/// is avoided on purpose; its output is implementation-defined and would break
/// cross-platform replay of runs.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  /// Derived stream: deterministic function of (seed, stream id).
  static Rng stream(std::uint64_t seed, std::uint64_t id) {
    return Rng(splitmix64(seed ^ splitmix64(id + 1)));
  }

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform in [0, 1) with 53-bit resolution.
  Scalar uniform() { return static_cast<Scalar>(engine_() >> 11) * 0x1.0p-53; }

  Scalar uniform(Scalar lo, Scalar hi) { return lo + (hi - lo) * uniform(); }

  /// Uniform integer in [0, n).
  Index uniform_index(Index n) {
    // Modulo bias is < 2^-40 for any n used here (datasets, grids).
    return static_cast<Index>(engine_() % static_cast<std::uint64_t>(n));
  }

  int rademacher() { return (engine_() & 1ULL) ? 1 : -1; }

  /// Standard normal via the polar method.
  Scalar gaussian() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    Scalar u, v, s;
    do {
      u = 2.0 * uniform() - 1.0;
      v = 2.0 * uniform() - 1.0;
      s = u * u + v * v;
    } while (s >= 1.0 || s == 0.0);
    const Scalar f = std::sqrt(-2.0 * std::log(s) / s);
    spare_ = v * f;
    have_spare_ = true;
    return u * f;
  }

  Vector gaussian_vector(Index n) {
    Vector out(n);
    for (Index i = 0; i < n; ++i) out[i] = gaussian();
    return out;
  }

  /// Uniform direction on the unit sphere in R^n.
  Vector unit_vector(Index n) {
    Vector v = gaussian_vector(n);
    Scalar norm = v.norm();
    while (norm == 0.0) {
      v = gaussian_vector(n);
      norm = v.norm();
    }
    return v / norm;
  }

 private:
  std::mt19937_64 engine_;
  Scalar spare_ = 0.0;
  bool have_spare_ = false;
};

}  // namespace conlearn
