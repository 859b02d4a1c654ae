#pragma once

#include <cstdint>
#include <string>
#include <variant>

#include "genrank/rng.hpp"
#include "genrank/structures.hpp"

namespace genrank {

/// Real arithmetic with a relative rank tolerance.
struct FloatTol {
  double rel_tol = 1e-8;
};

/// Prime-field arithmetic mod p. Default is the Mersenne prime 2^31 - 1,
/// chosen so products of reduced values fit in 64-bit intermediates.
struct PrimeField {
  std::uint64_t p = 2147483647ULL;
};

using ScalarRing = std::variant<FloatTol, PrimeField>;

/// Throws ValidationError on out-of-range tolerance or non-prime modulus.
void validate(const ScalarRing &ring);

/// Stable descriptor, e.g. "field(p=2147483647)" or "float(tol=1e-08)".
std::string describe(const ScalarRing &ring);

/// Arithmetic context over the reals for the templated block builders.
struct RealOps {
  using value_type = double;
  double rel_tol = 1e-8;

  static double zero() { return 0.0; }
  static double one() { return 1.0; }
  static double add(double a, double b) { return a + b; }
  static double sub(double a, double b) { return a - b; }
  static double mul(double a, double b) { return a * b; }
  static double neg(double a) { return -a; }

  // Genericity only needs an absolutely continuous law; standard normal.
  static double draw(SplitMix64 &rng) { return rng.next_normal(); }
};

/// Arithmetic context mod p. Values are kept reduced to [0, p).
class FieldOps {
public:
  using value_type = std::uint64_t;

  explicit FieldOps(std::uint64_t p = 2147483647ULL)
      : p_(p), mersenne31_(p == 0x7FFFFFFFULL) {}

  std::uint64_t p() const { return p_; }

  static std::uint64_t zero() { return 0; }
  static std::uint64_t one() { return 1; }

  std::uint64_t add(std::uint64_t a, std::uint64_t b) const {
    const std::uint64_t s = a + b;
    return s >= p_ ? s - p_ : s;
  }
  std::uint64_t sub(std::uint64_t a, std::uint64_t b) const {
    return a >= b ? a - b : a + p_ - b;
  }
  std::uint64_t neg(std::uint64_t a) const { return a == 0 ? 0 : p_ - a; }

  std::uint64_t mul(std::uint64_t a, std::uint64_t b) const {
    if (mersenne31_) {
      // Fold-based reduction mod 2^31 - 1; a*b < 2^62 so two folds suffice.
      std::uint64_t t = a * b;
      t = (t & 0x7FFFFFFFULL) + (t >> 31);
      t = (t & 0x7FFFFFFFULL) + (t >> 31);
      return t >= 0x7FFFFFFFULL ? t - 0x7FFFFFFFULL : t;
    }
    return (a * b) % p_;
  }

  std::uint64_t pow(std::uint64_t a, std::uint64_t e) const {
    std::uint64_t out = 1;
    while (e) {
      if (e & 1)
        out = mul(out, a);
      a = mul(a, a);
      e >>= 1;
    }
    return out;
  }

  std::uint64_t inv(std::uint64_t a) const { return pow(a, p_ - 2); }

  /// Reduce a signed integer into [0, p).
  std::uint64_t reduce(std::int64_t v) const {
    std::int64_t r = v % static_cast<std::int64_t>(p_);
    if (r < 0)
      r += static_cast<std::int64_t>(p_);
    return static_cast<std::uint64_t>(r);
  }

  // Uniform on {1, ..., p-1}: structured zeros would break genericity.
  std::uint64_t draw(SplitMix64 &rng) const {
    return 1 + rng.next_below(p_ - 1);
  }

private:
  std::uint64_t p_;
  bool mersenne31_;
};

} // namespace genrank
