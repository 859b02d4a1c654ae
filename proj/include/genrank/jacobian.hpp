#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "genrank/matrix.hpp"
#include "genrank/rng.hpp"
#include "genrank/scalar_ring.hpp"
#include "genrank/structures.hpp"

namespace genrank {

/// Factor vectors of one rank-one term. Interpretation by structure:
///   Free                    one factor per mode, lengths dims[l]
///   Symmetric               a single factor of length n
///   SymmetricSlices         {b (length j), c (length k)}
///   CenteredSymmetricSlices {b (length j, sums to zero), c (length k)}
template <class T> struct TermParams {
  std::vector<std::vector<T>> factors;
};

/// Kronecker product of two row vectors; out[(i)*len(v)+j] = u_i * v_j.
/// Variadic use composes left-associated.
template <class Ops>
std::vector<typename Ops::value_type>
kron_rows(std::span<const typename Ops::value_type> u,
          std::span<const typename Ops::value_type> v, const Ops &ops) {
  std::vector<typename Ops::value_type> out(u.size() * v.size());
  std::size_t pos = 0;
  for (std::size_t i = 0; i < u.size(); ++i)
    for (std::size_t j = 0; j < v.size(); ++j)
      out[pos++] = ops.mul(u[i], v[j]);
  return out;
}

template <class Ops>
TermParams<typename Ops::value_type>
draw_term(const TensorStructure &s, SplitMix64 &rng, const Ops &ops) {
  using T = typename Ops::value_type;
  const auto draw_vec = [&](std::int64_t len) {
    std::vector<T> v(static_cast<std::size_t>(len));
    for (auto &x : v)
      x = ops.draw(rng);
    return v;
  };

  TermParams<T> term;
  if (const auto *f = std::get_if<Free>(&s)) {
    for (std::int64_t d : f->dims)
      term.factors.push_back(draw_vec(d));
  } else if (const auto *y = std::get_if<Symmetric>(&s)) {
    term.factors.push_back(draw_vec(y->n));
  } else if (const auto *ss = std::get_if<SymmetricSlices>(&s)) {
    term.factors.push_back(draw_vec(ss->j));
    term.factors.push_back(draw_vec(ss->k));
  } else {
    // Only j-1 entries are free; the last is the negated sum, which keeps
    // every slice of the resulting term double centered.
    const auto &c = std::get<CenteredSymmetricSlices>(s);
    std::vector<T> b = draw_vec(c.j - 1);
    T sum = ops.zero();
    for (const T &x : b)
      sum = ops.add(sum, x);
    b.push_back(ops.neg(sum));
    term.factors.push_back(std::move(b));
    term.factors.push_back(draw_vec(c.k));
  }
  return term;
}

namespace detail {

template <class Ops>
void check_factor(const TermParams<typename Ops::value_type> &term,
                  std::size_t idx, std::int64_t len, const Ops &) {
  if (idx >= term.factors.size() ||
      term.factors[idx].size() != static_cast<std::size_t>(len))
    throw ValidationError("term parameters do not match structure shape");
}

/// out += kron(u, v, w), left-associated layout.
template <class Ops>
void add_kron3(std::span<typename Ops::value_type> out,
               std::span<const typename Ops::value_type> u,
               std::span<const typename Ops::value_type> v,
               std::span<const typename Ops::value_type> w, const Ops &ops) {
  std::size_t pos = 0;
  for (std::size_t i = 0; i < u.size(); ++i)
    for (std::size_t j = 0; j < v.size(); ++j) {
      const auto uv = ops.mul(u[i], v[j]);
      for (std::size_t m = 0; m < w.size(); ++m) {
        out[pos] = ops.add(out[pos], ops.mul(uv, w[m]));
        ++pos;
      }
    }
}

} // namespace detail

/// Jacobian block of the free parametrization: L row groups, group l holding
/// the partials along mode l, i.e. kron(f_1,...,e_i,...,f_L).
template <class Ops>
Matrix<typename Ops::value_type>
block_free(const std::vector<std::int64_t> &dims,
           const TermParams<typename Ops::value_type> &term, const Ops &ops) {
  using T = typename Ops::value_type;
  const std::size_t order = dims.size();
  if (order < 2 || term.factors.size() != order)
    throw ValidationError("term parameters do not match structure shape");
  for (std::size_t l = 0; l < order; ++l)
    detail::check_factor(term, l, dims[l], ops);

  // prefix[l] = kron of factors 0..l-1, suffix[l] = kron of factors l+1 on.
  std::vector<std::vector<T>> prefix(order + 1), suffix(order + 1);
  prefix[0] = {ops.one()};
  for (std::size_t l = 0; l < order; ++l)
    prefix[l + 1] = kron_rows<Ops>(prefix[l], term.factors[l], ops);
  suffix[order] = {ops.one()};
  for (std::size_t l = order; l-- > 0;)
    suffix[l] = kron_rows<Ops>(term.factors[l], suffix[l + 1], ops);

  std::int64_t total_rows = 0, cols = 1;
  for (std::int64_t d : dims) {
    total_rows += d;
    cols *= d;
  }
  Matrix<T> block(total_rows, cols);
  std::int64_t row = 0;
  for (std::size_t l = 0; l < order; ++l) {
    const auto &pre = prefix[l];
    const auto &suf = suffix[l + 1];
    const auto slen = static_cast<std::int64_t>(suf.size());
    for (std::int64_t i = 0; i < dims[l]; ++i, ++row) {
      auto out = block.row(row);
      for (std::size_t pi = 0; pi < pre.size(); ++pi) {
        const std::int64_t base =
            (static_cast<std::int64_t>(pi) * dims[l] + i) * slen;
        for (std::int64_t si = 0; si < slen; ++si)
          out[base + si] = ops.mul(pre[pi], suf[si]);
      }
    }
  }
  return block;
}

/// Jacobian block of a -> a^(x)L: n rows, row i summing the L slot
/// placements of e_i among copies of a.
template <class Ops>
Matrix<typename Ops::value_type>
block_symmetric(std::int64_t n, std::int64_t order,
                const TermParams<typename Ops::value_type> &term,
                const Ops &ops) {
  using T = typename Ops::value_type;
  if (term.factors.size() != 1)
    throw ValidationError("term parameters do not match structure shape");
  detail::check_factor(term, 0, n, ops);
  const auto &a = term.factors[0];

  // power[t] = a^(x)t
  std::vector<std::vector<T>> power(order);
  power[0] = {ops.one()};
  for (std::int64_t t = 1; t < order; ++t)
    power[t] = kron_rows<Ops>(power[t - 1], a, ops);

  std::int64_t cols = 1;
  for (std::int64_t t = 0; t < order; ++t)
    cols *= n;
  Matrix<T> block(n, cols);
  for (std::int64_t i = 0; i < n; ++i) {
    auto out = block.row(i);
    for (std::int64_t slot = 0; slot < order; ++slot) {
      const auto &pre = power[slot];
      const auto &suf = power[order - 1 - slot];
      const auto slen = static_cast<std::int64_t>(suf.size());
      for (std::size_t pi = 0; pi < pre.size(); ++pi) {
        const std::int64_t base = (static_cast<std::int64_t>(pi) * n + i) * slen;
        for (std::int64_t si = 0; si < slen; ++si)
          out[base + si] =
              ops.add(out[base + si], ops.mul(pre[pi], suf[si]));
      }
    }
  }
  return block;
}

/// Jacobian block for symmetric slices: j rows of
/// kron(e_i,b,c) + kron(b,e_i,c), then k rows of kron(b,b,e_m).
template <class Ops>
Matrix<typename Ops::value_type>
block_indscal(std::int64_t j, std::int64_t k,
              const TermParams<typename Ops::value_type> &term,
              const Ops &ops) {
  using T = typename Ops::value_type;
  if (term.factors.size() != 2)
    throw ValidationError("term parameters do not match structure shape");
  detail::check_factor(term, 0, j, ops);
  detail::check_factor(term, 1, k, ops);
  const auto &b = term.factors[0];
  const auto &c = term.factors[1];

  Matrix<T> block(j + k, j * j * k);
  std::vector<T> unit(static_cast<std::size_t>(j), ops.zero());
  for (std::int64_t i = 0; i < j; ++i) {
    unit[i] = ops.one();
    detail::add_kron3<Ops>(block.row(i), unit, b, c, ops);
    detail::add_kron3<Ops>(block.row(i), b, unit, c, ops);
    unit[i] = ops.zero();
  }
  for (std::int64_t m = 0; m < k; ++m) {
    auto out = block.row(j + m);
    std::size_t pos = static_cast<std::size_t>(m);
    for (std::int64_t x = 0; x < j; ++x)
      for (std::int64_t y = 0; y < j; ++y) {
        out[pos] = ops.mul(b[x], b[y]);
        pos += k;
      }
  }
  return block;
}

/// Jacobian block for double centered symmetric slices: j-1 rows built from
/// z_i = row i of [I_{j-1}, -1], then k rows of kron(b,b,e_m).
template <class Ops>
Matrix<typename Ops::value_type>
block_centered(std::int64_t j, std::int64_t k,
               const TermParams<typename Ops::value_type> &term,
               const Ops &ops) {
  using T = typename Ops::value_type;
  if (term.factors.size() != 2)
    throw ValidationError("term parameters do not match structure shape");
  detail::check_factor(term, 0, j, ops);
  detail::check_factor(term, 1, k, ops);
  const auto &b = term.factors[0];
  const auto &c = term.factors[1];

  Matrix<T> block((j - 1) + k, j * j * k);
  std::vector<T> z(static_cast<std::size_t>(j), ops.zero());
  z[j - 1] = ops.neg(ops.one());
  for (std::int64_t i = 0; i < j - 1; ++i) {
    z[i] = ops.one();
    detail::add_kron3<Ops>(block.row(i), z, b, c, ops);
    detail::add_kron3<Ops>(block.row(i), b, z, c, ops);
    z[i] = ops.zero();
  }
  for (std::int64_t m = 0; m < k; ++m) {
    auto out = block.row(j - 1 + m);
    std::size_t pos = static_cast<std::size_t>(m);
    for (std::int64_t x = 0; x < j; ++x)
      for (std::int64_t y = 0; y < j; ++y) {
        out[pos] = ops.mul(b[x], b[y]);
        pos += k;
      }
  }
  return block;
}

/// Dispatch on the structure variant. Row/column counts always match
/// StructureInfo{block_rows, embed_cols}.
template <class Ops>
Matrix<typename Ops::value_type>
build_block(const TensorStructure &s,
            const TermParams<typename Ops::value_type> &term, const Ops &ops) {
  if (const auto *f = std::get_if<Free>(&s))
    return block_free(f->dims, term, ops);
  if (const auto *y = std::get_if<Symmetric>(&s))
    return block_symmetric(y->n, y->order, term, ops);
  if (const auto *ss = std::get_if<SymmetricSlices>(&s))
    return block_indscal(ss->j, ss->k, term, ops);
  const auto &c = std::get<CenteredSymmetricSlices>(s);
  return block_centered(c.j, c.k, term, ops);
}

} // namespace genrank
