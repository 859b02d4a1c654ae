#include "genrank/scalar_ring.hpp"

#include <cstdio>

namespace genrank {

namespace {

// Deterministic Miller-Rabin for n < 2^32 (bases 2, 7, 61).
bool is_prime(std::uint64_t n) {
  if (n < 2)
    return false;
  for (std::uint64_t q : {2ULL, 3ULL, 5ULL, 7ULL, 61ULL})
    if (n == q)
      return true;
  if (n % 2 == 0)
    return false;
  std::uint64_t d = n - 1;
  int s = 0;
  while (d % 2 == 0) {
    d /= 2;
    ++s;
  }
  for (std::uint64_t a : {2ULL, 7ULL, 61ULL}) {
    std::uint64_t x = 1, base = a % n, e = d;
    while (e) {
      if (e & 1)
        x = (x * base) % n;
      base = (base * base) % n;
      e >>= 1;
    }
    if (x == 1 || x == n - 1)
      continue;
    bool witness = true;
    for (int i = 0; i < s - 1 && witness; ++i) {
      x = (x * x) % n;
      if (x == n - 1)
        witness = false;
    }
    if (witness)
      return false;
  }
  return true;
}

} // namespace

void validate(const ScalarRing &ring) {
  if (const auto *f = std::get_if<FloatTol>(&ring)) {
    if (!(f->rel_tol > 0.0 && f->rel_tol < 1.0))
      throw ValidationError("float tolerance must lie in (0, 1)");
    return;
  }
  const auto &pf = std::get<PrimeField>(ring);
  if (pf.p >= (1ULL << 32))
    throw ValidationError("field modulus too large: p^2 must fit in 64 bits");
  if (!is_prime(pf.p))
    throw ValidationError("field modulus must be prime");
}

std::string describe(const ScalarRing &ring) {
  char buf[64];
  if (const auto *f = std::get_if<FloatTol>(&ring)) {
    std::snprintf(buf, sizeof buf, "float(tol=%g)", f->rel_tol);
    return buf;
  }
  const auto &pf = std::get<PrimeField>(ring);
  std::snprintf(buf, sizeof buf, "field(p=%llu)",
                static_cast<unsigned long long>(pf.p));
  return buf;
}

} // namespace genrank
