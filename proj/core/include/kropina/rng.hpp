#pragma once

#include <cmath>
#include <cstdint>

#include "kropina/tensor.hpp"

namespace kropina {

// Deterministic splittable generator.  Sampling must reproduce bit-for-bit
// across platforms, so we avoid std::uniform_real_distribution (its output
// is implementation-defined) and map the raw 64-bit stream ourselves.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() {
    state_ += 0x9e3779b97f4a7c15ull;
    std::uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }

  // Uniform in [0, 1).
  double uniform() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  double gaussian() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u, v, s;
    do {
      u = 2.0 * uniform() - 1.0;
      v = 2.0 * uniform() - 1.0;
      s = u * u + v * v;
    } while (s >= 1.0 || s == 0.0);
    const double f = std::sqrt(-2.0 * std::log(s) / s);
    spare_ = v * f;
    have_spare_ = true;
    return u * f;
  }

  // Uniform direction on the unit sphere in R^n.
  Vec<double> sphere_dir(int n) {
    Vec<double> v(n);
    double norm2;
    do {
      norm2 = 0;
      for (int i = 0; i < n; ++i) {
        v[i] = gaussian();
        norm2 += v[i] * v[i];
      }
    } while (norm2 < 1e-12);
    const double inv = 1.0 / std::sqrt(norm2);
    for (int i = 0; i < n; ++i) v[i] *= inv;
    return v;
  }

  std::uint64_t split() { return next_u64(); }

 private:
  std::uint64_t state_;
  bool have_spare_ = false;
  double spare_ = 0;
};

}  // namespace kropina
