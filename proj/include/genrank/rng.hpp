#pragma once

#include <cmath>
#include <cstdint>

namespace genrank {

/// SplitMix64 stream (Steele, Lea, Flood 2014). Fixed algorithm so that
/// results are reproducible across platforms and standard-library versions;
/// never replace with a platform-default engine.
class SplitMix64 {
public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  /// Uniform on (0,1], 53-bit resolution.
  double next_unit_pos() {
    return static_cast<double>((next() >> 11) + 1) * 0x1.0p-53;
  }

  /// Uniform on [0,1).
  double next_unit() {
    return static_cast<double>(next() >> 11) * 0x1.0p-53;
  }

  /// Standard normal via Box-Muller (cosine branch, one pair of uniforms
  /// per variate).
  double next_normal() {
    const double u1 = next_unit_pos();
    const double u2 = next_unit();
    return std::sqrt(-2.0 * std::log(u1)) *
           std::cos(6.283185307179586476925286766559 * u2);
  }

  /// Uniform integer on [0, n). Rejection sampling, no modulo bias.
  std::uint64_t next_below(std::uint64_t n) {
    const std::uint64_t threshold = (0 - n) % n; // 2^64 mod n
    std::uint64_t x;
    do {
      x = next();
    } while (x < threshold);
    return x % n;
  }

private:
  std::uint64_t state_;
};

/// One step of the SplitMix64 output function applied to a raw word.
inline std::uint64_t splitmix64_scramble(std::uint64_t z) {
  z += 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

/// Sub-seed for trial `index` of a run seeded with `seed`. Index 0 keeps the
/// seed itself, so a single-trial consensus run equals the plain run.
inline std::uint64_t trial_seed(std::uint64_t seed, int index) {
  if (index == 0)
    return seed;
  return splitmix64_scramble(seed +
                             static_cast<std::uint64_t>(index) *
                                 0x9E3779B97F4A7C15ULL);
}

/// FNV-1a over a byte string; used to derive per-cell seeds from labels.
inline std::uint64_t fnv1a64(const char *data, std::size_t len) {
  std::uint64_t h = 14695981039346656037ULL;
  for (std::size_t i = 0; i < len; ++i) {
    h ^= static_cast<unsigned char>(data[i]);
    h *= 1099511628211ULL;
  }
  return h;
}

} // namespace genrank
