#ifndef FUZZYSTAB_RNG_HPP
#define FUZZYSTAB_RNG_HPP

#include <bit>
#include <cmath>
#include <cstdint>
#include <span>
#include <vector>

namespace fuzzystab {

/// Counter-based deterministic random bits. All randomness in the library
/// flows through this generator seeded from named 64-bit seeds; there is no
/// ambient entropy anywhere, so every pipeline output is reproducible.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  /// Uniform double in [0, 1).
  double next_unit() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  /// Uniform double in [-1, 1).
  double next_symmetric() { return 2.0 * next_unit() - 1.0; }

  /// Standard normal via Box-Muller.
  double next_gaussian() {
    double u1 = next_unit();
    double u2 = next_unit();
    if (u1 <= 0.0) u1 = 0x1.0p-53;
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925286766559 * u2);
  }

 private:
  std::uint64_t state_;
};

/// Canonical bit pattern of a double for hashing; folds -0.0 into +0.0 so
/// that numerically equal inputs hash identically.
inline std::uint64_t canonical_bits(double v) {
  if (v == 0.0) v = 0.0;
  return std::bit_cast<std::uint64_t>(v);
}

/// Hash of (seed, coefficient vector), used to derive per-point noise streams.
inline std::uint64_t hash_seed_coeffs(std::uint64_t seed, std::span<const double> coeffs) {
  std::uint64_t h = seed ^ 0x6a09e667f3bcc908ULL;
  for (double c : coeffs) {
    h ^= canonical_bits(c) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
    h *= 0xff51afd7ed558ccdULL;
    h ^= h >> 33;
  }
  return h;
}

}  // namespace fuzzystab

#endif
