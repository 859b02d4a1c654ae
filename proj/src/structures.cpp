#include "genrank/structures.hpp"

#include <cstdio>

namespace genrank {

namespace {

std::int64_t checked_mul(std::int64_t a, std::int64_t b) {
  std::int64_t out;
  if (__builtin_mul_overflow(a, b, &out))
    throw ValidationError("dimension product overflows 64-bit range");
  return out;
}

std::int64_t checked_pow(std::int64_t base, std::int64_t exp) {
  std::int64_t out = 1;
  for (std::int64_t i = 0; i < exp; ++i)
    out = checked_mul(out, base);
  return out;
}

// binom(n+l-1, l) without intermediate overflow for desk-scale inputs.
std::int64_t binom(std::int64_t n, std::int64_t k) {
  if (k < 0 || k > n)
    return 0;
  if (k > n - k)
    k = n - k;
  std::int64_t out = 1;
  for (std::int64_t i = 1; i <= k; ++i) {
    out = checked_mul(out, n - k + i);
    out /= i;
  }
  return out;
}

} // namespace

void validate(const TensorStructure &s) {
  if (const auto *f = std::get_if<Free>(&s)) {
    if (f->dims.size() < 2)
      throw ValidationError("free structure needs order >= 2");
    for (std::int64_t d : f->dims)
      if (d < 1)
        throw ValidationError("free structure needs every dim >= 1");
    return;
  }
  if (const auto *y = std::get_if<Symmetric>(&s)) {
    if (y->n < 1)
      throw ValidationError("symmetric structure needs n >= 1");
    if (y->order < 2)
      throw ValidationError("symmetric structure needs order >= 2");
    return;
  }
  if (const auto *ss = std::get_if<SymmetricSlices>(&s)) {
    if (ss->j < 1)
      throw ValidationError("symmetric-slice structure needs j >= 1");
    if (ss->k < 1)
      throw ValidationError("symmetric-slice structure needs k >= 1");
    return;
  }
  const auto &c = std::get<CenteredSymmetricSlices>(s);
  if (c.j < 2)
    throw ValidationError("centered symmetric-slice structure needs j >= 2");
  if (c.k < 1)
    throw ValidationError("centered symmetric-slice structure needs k >= 1");
}

StructureInfo info(const TensorStructure &s) {
  validate(s);
  StructureInfo out;
  if (const auto *f = std::get_if<Free>(&s)) {
    const auto order = static_cast<std::int64_t>(f->dims.size());
    std::int64_t prod = 1, sum = 0;
    for (std::int64_t d : f->dims) {
      prod = checked_mul(prod, d);
      sum += d;
    }
    out.ambient_dim = prod;
    out.params_per_term = sum - (order - 1);
    out.block_rows = sum;
    out.embed_cols = prod;
  } else if (const auto *y = std::get_if<Symmetric>(&s)) {
    out.ambient_dim = binom(y->n + y->order - 1, y->order);
    out.params_per_term = y->n;
    out.block_rows = y->n;
    out.embed_cols = checked_pow(y->n, y->order);
  } else if (const auto *ss = std::get_if<SymmetricSlices>(&s)) {
    out.ambient_dim = ss->k * ss->j * (ss->j + 1) / 2;
    out.params_per_term = ss->j + ss->k - 1;
    out.block_rows = ss->j + ss->k;
    out.embed_cols = checked_mul(ss->j * ss->j, ss->k);
  } else {
    const auto &c = std::get<CenteredSymmetricSlices>(s);
    out.ambient_dim = c.k * c.j * (c.j - 1) / 2;
    out.params_per_term = c.j + c.k - 2;
    out.block_rows = (c.j - 1) + c.k;
    out.embed_cols = checked_mul(c.j * c.j, c.k);
  }
  return out;
}

std::string describe(const TensorStructure &s) {
  char buf[64];
  if (const auto *f = std::get_if<Free>(&s)) {
    std::string out = "free(";
    for (std::size_t i = 0; i < f->dims.size(); ++i) {
      if (i)
        out += 'x';
      std::snprintf(buf, sizeof buf, "%lld",
                    static_cast<long long>(f->dims[i]));
      out += buf;
    }
    return out + ")";
  }
  if (const auto *y = std::get_if<Symmetric>(&s)) {
    std::snprintf(buf, sizeof buf, "sym(n=%lld,L=%lld)",
                  static_cast<long long>(y->n),
                  static_cast<long long>(y->order));
    return buf;
  }
  if (const auto *ss = std::get_if<SymmetricSlices>(&s)) {
    std::snprintf(buf, sizeof buf, "indscal(j=%lld,k=%lld)",
                  static_cast<long long>(ss->j),
                  static_cast<long long>(ss->k));
    return buf;
  }
  const auto &c = std::get<CenteredSymmetricSlices>(s);
  std::snprintf(buf, sizeof buf, "indscal-centered(j=%lld,k=%lld)",
                static_cast<long long>(c.j), static_cast<long long>(c.k));
  return buf;
}

} // namespace genrank
