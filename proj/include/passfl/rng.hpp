// Copyright (c) 2026 The passfl authors
// SPDX-License-Identifier: Apache-2.0

#ifndef PASSFL_RNG_HPP
#define PASSFL_RNG_HPP

#include <cmath>
#include <complex>
#include <cstdint>

namespace passfl {

// splitmix64 step; passes BigCrush and is byte-for-byte reproducible across
// platforms, unlike the standard-library distributions.
inline std::uint64_t splitmix64_next(std::uint64_t& state) {
  state += 0x9e3779b97f4a7c15ull;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

/// Derives a decorrelated child seed from a master seed and up to three
/// stream tags (e.g. round index, device index). Same inputs, same seed.
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t a,
                                 std::uint64_t b = 0, std::uint64_t c = 0) {
  std::uint64_t s = master;
  for (std::uint64_t tag : {a, b, c}) {
    s ^= tag + 0x9e3779b97f4a7c15ull + (s << 6) + (s >> 2);
    splitmix64_next(s);
  }
  return s;
}

/// Deterministic random stream. All stochastic parts of the library draw
/// from explicitly seeded instances of this class; there is no global RNG.
class rng {
 public:
  explicit rng(std::uint64_t seed)
      : state_(seed ? seed : 0x9e3779b97f4a7c15ull) {}

  std::uint64_t next_u64() { return splitmix64_next(state_); }

  /// Uniform in [0, 1) with 53 bits of resolution.
  double uniform01() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  /// Integer in [0, n).
  std::uint64_t below(std::uint64_t n) {
    // modulo bias is < 2^-40 for the n used here (dataset sizes, indices)
    return n ? next_u64() % n : 0;
  }

  /// Standard normal via Box-Muller (pairwise, one value cached).
  double gauss() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u1 = 1.0 - uniform01();  // (0, 1]
    double u2 = uniform01();
    double r = std::sqrt(-2.0 * std::log(u1));
    double t = 6.283185307179586476925286766559 * u2;
    spare_ = r * std::sin(t);
    has_spare_ = true;
    return r * std::cos(t);
  }

  /// Circularly-symmetric complex Gaussian with total variance `var`.
  std::complex<double> cgauss(double var) {
    double s = std::sqrt(var / 2.0);
    double re = gauss();
    double im = gauss();
    return {s * re, s * im};
  }

  /// Fisher-Yates shuffle.
  template <typename T>
  void shuffle(T& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      std::size_t j = static_cast<std::size_t>(below(i));
      std::swap(v[i - 1], v[j]);
    }
  }

 private:
  std::uint64_t state_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace passfl

#endif  // PASSFL_RNG_HPP
