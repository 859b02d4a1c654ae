#include "genrank/validation.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numeric>

namespace genrank {

namespace {

std::vector<std::int64_t> strides_of(const std::vector<std::int64_t> &dims) {
  std::vector<std::int64_t> st(dims.size(), 1);
  for (std::size_t m = dims.size(); m-- > 1;)
    st[m - 1] = st[m] * dims[m];
  return st;
}

DenseTensor free_member(const std::vector<std::int64_t> &dims,
                        SplitMix64 &rng) {
  DenseTensor t;
  t.dims = dims;
  std::int64_t n = 1;
  for (std::int64_t d : dims)
    n *= d;
  t.values.resize(static_cast<std::size_t>(n));
  for (double &v : t.values)
    v = rng.next_normal();
  return t;
}

DenseTensor slices_member(std::int64_t j, std::int64_t k, bool centered,
                          SplitMix64 &rng) {
  DenseTensor t = free_member({j, j, k}, rng);
  auto at = [&](std::int64_t x, std::int64_t y, std::int64_t z) -> double & {
    return t.values[static_cast<std::size_t>((x * j + y) * k + z)];
  };
  for (std::int64_t z = 0; z < k; ++z) {
    for (std::int64_t x = 0; x < j; ++x)
      for (std::int64_t y = x + 1; y < j; ++y) {
        double s = 0.5 * (at(x, y, z) + at(y, x, z));
        at(x, y, z) = s;
        at(y, x, z) = s;
      }
    if (!centered)
      continue;
    std::vector<double> mean(static_cast<std::size_t>(j), 0.0);
    double grand = 0.0;
    for (std::int64_t x = 0; x < j; ++x)
      for (std::int64_t y = 0; y < j; ++y) {
        mean[static_cast<std::size_t>(x)] += at(x, y, z);
        grand += at(x, y, z);
      }
    for (double &m : mean)
      m /= static_cast<double>(j);
    grand /= static_cast<double>(j * j);
    for (std::int64_t x = 0; x < j; ++x)
      for (std::int64_t y = 0; y < j; ++y)
        at(x, y, z) -= mean[static_cast<std::size_t>(x)] +
                       mean[static_cast<std::size_t>(y)] - grand;
  }
  return t;
}

DenseTensor symmetric_member(std::int64_t n, int order, SplitMix64 &rng) {
  std::vector<std::int64_t> dims(static_cast<std::size_t>(order), n);
  DenseTensor raw = free_member(dims, rng);
  DenseTensor out;
  out.dims = dims;
  out.values.resize(raw.values.size());
  const auto st = strides_of(dims);
  std::vector<std::int64_t> idx(dims.size(), 0);
  for (std::size_t lin = 0; lin < out.values.size(); ++lin) {
    std::vector<std::int64_t> perm = idx;
    std::sort(perm.begin(), perm.end());
    double sum = 0.0;
    std::int64_t count = 0;
    do {
      std::int64_t p = 0;
      for (std::size_t m = 0; m < perm.size(); ++m)
        p += perm[m] * st[m];
      sum += raw.values[static_cast<std::size_t>(p)];
      ++count;
    } while (std::next_permutation(perm.begin(), perm.end()));
    out.values[lin] = sum / static_cast<double>(count);
    for (std::size_t m = dims.size(); m-- > 0;) {
      if (++idx[m] < dims[m])
        break;
      idx[m] = 0;
    }
  }
  return out;
}

} // namespace

DenseTensor random_member(const TensorStructure &s, SplitMix64 &rng) {
  validate(s);
  struct Visitor {
    SplitMix64 &rng;
    DenseTensor operator()(const Free &f) { return free_member(f.dims, rng); }
    DenseTensor operator()(const Symmetric &y) {
      return symmetric_member(y.n, y.order, rng);
    }
    DenseTensor operator()(const SymmetricSlices &y) {
      return slices_member(y.j, y.k, false, rng);
    }
    DenseTensor operator()(const CenteredSymmetricSlices &y) {
      return slices_member(y.j, y.k, true, rng);
    }
  };
  return std::visit(Visitor{rng}, s);
}

Rank222 classify_222(const DenseTensor &t) {
  if (t.dims != std::vector<std::int64_t>{2, 2, 2} || t.values.size() != 8)
    throw ValidationError("classify_222 requires a 2x2x2 tensor");
  const auto &v = t.values;
  auto a = [&](int i, int j) { return v[static_cast<std::size_t>(4 * i + 2 * j)]; };
  auto b = [&](int i, int j) { return v[static_cast<std::size_t>(4 * i + 2 * j + 1)]; };
  // det(A + lambda B) = c0 + c1 lambda + c2 lambda^2
  double c0 = a(0, 0) * a(1, 1) - a(0, 1) * a(1, 0);
  double c1 = a(0, 0) * b(1, 1) + a(1, 1) * b(0, 0) - a(0, 1) * b(1, 0) -
              a(1, 0) * b(0, 1);
  double c2 = b(0, 0) * b(1, 1) - b(0, 1) * b(1, 0);
  double s = std::max({std::abs(c0), std::abs(c1), std::abs(c2)});
  if (s == 0.0)
    return Rank222::Boundary;
  if (std::abs(c2) <= 1e-10 * s)
    return Rank222::Boundary; // root at infinity: degenerate pencil
  double disc = c1 * c1 - 4.0 * c0 * c2;
  if (std::abs(disc) <= 1e-10 * s * s)
    return Rank222::Boundary;
  return disc > 0.0 ? Rank222::RankTwo : Rank222::RankThree;
}

namespace {

// Unfolding along mode ell: rows indexed by that mode, columns by the
// remaining modes in ascending order with the last one fastest. For the
// row-major flat layout this makes the mode-0 unfolding a plain reshape.
Eigen::MatrixXd unfold(const DenseTensor &t, std::size_t ell) {
  const auto st = strides_of(t.dims);
  const std::int64_t rows = t.dims[ell];
  const std::int64_t cols = t.size() / rows;
  Eigen::MatrixXd m(rows, cols);
  std::vector<std::int64_t> idx(t.dims.size(), 0);
  for (std::size_t lin = 0; lin < t.values.size(); ++lin) {
    std::int64_t col = 0;
    for (std::size_t d = 0; d < t.dims.size(); ++d)
      if (d != ell)
        col = col * t.dims[d] + idx[d];
    m(idx[ell], col) = t.values[lin];
    for (std::size_t d = t.dims.size(); d-- > 0;) {
      if (++idx[d] < t.dims[d])
        break;
      idx[d] = 0;
    }
  }
  return m;
}

Eigen::MatrixXd khatri_rao_skip(const std::vector<Eigen::MatrixXd> &factors,
                                std::size_t skip) {
  Eigen::MatrixXd kr;
  bool first = true;
  for (std::size_t m = 0; m < factors.size(); ++m) {
    if (m == skip)
      continue;
    if (first) {
      kr = factors[m];
      first = false;
      continue;
    }
    Eigen::MatrixXd next(kr.rows() * factors[m].rows(), kr.cols());
    for (Eigen::Index c = 0; c < kr.cols(); ++c)
      for (Eigen::Index i = 0; i < kr.rows(); ++i)
        next.block(i * factors[m].rows(), c, factors[m].rows(), 1) =
            kr(i, c) * factors[m].col(c);
    kr = next;
  }
  return kr;
}

} // namespace

FitResult als_fit(const DenseTensor &t, std::int64_t r,
                  const AlsOptions &opts) {
  if (r < 1)
    throw ValidationError("als_fit requires at least one term");
  if (t.dims.empty())
    throw ValidationError("als_fit requires a non-empty tensor");
  const std::size_t order = t.dims.size();
  double tnorm = 0.0;
  for (double v : t.values)
    tnorm += v * v;
  tnorm = std::sqrt(tnorm);
  if (tnorm == 0.0)
    throw ValidationError("als_fit requires a nonzero tensor");

  std::vector<Eigen::MatrixXd> unfoldings(order);
  for (std::size_t m = 0; m < order; ++m)
    unfoldings[m] = unfold(t, m);

  FitResult best;
  best.relative_residual = std::numeric_limits<double>::infinity();

  for (int restart = 0; restart < opts.restarts; ++restart) {
    SplitMix64 rng(splitmix64_scramble(
        opts.seed + 0x9E3779B97F4A7C15ULL * static_cast<std::uint64_t>(restart + 1)));
    std::vector<Eigen::MatrixXd> factors(order);
    for (std::size_t m = 0; m < order; ++m) {
      factors[m].resize(t.dims[m], r);
      for (Eigen::Index i = 0; i < factors[m].rows(); ++i)
        for (Eigen::Index c = 0; c < factors[m].cols(); ++c)
          factors[m](i, c) = rng.next_normal();
    }

    std::vector<double> history;
    double res = std::numeric_limits<double>::infinity();
    int iters = 0;
    for (int sweep = 0; sweep < opts.max_iter; ++sweep) {
      for (std::size_t m = 0; m < order; ++m) {
        Eigen::MatrixXd kr = khatri_rao_skip(factors, m);
        Eigen::MatrixXd gram = Eigen::MatrixXd::Ones(r, r);
        for (std::size_t o = 0; o < order; ++o)
          if (o != m)
            gram = gram.cwiseProduct(
                (factors[o].transpose() * factors[o]).eval());
        Eigen::MatrixXd rhs = (unfoldings[m] * kr).transpose();
        factors[m] = gram.completeOrthogonalDecomposition().solve(rhs).transpose();
      }
      Eigen::MatrixXd approx = factors[0] * khatri_rao_skip(factors, 0).transpose();
      double prev = res;
      res = (unfoldings[0] - approx).norm() / tnorm;
      history.push_back(res);
      iters = sweep + 1;
      if (res < 1e-14 || std::abs(prev - res) < opts.conv_tol)
        break;
    }

    double max_prod = 0.0;
    for (Eigen::Index c = 0; c < r; ++c) {
      double prod = 1.0;
      for (std::size_t m = 0; m < order; ++m)
        prod *= factors[m].col(c).norm();
      max_prod = std::max(max_prod, prod);
    }

    if (res < best.relative_residual) {
      best.relative_residual = res;
      best.degenerate = max_prod > opts.blowup * tnorm;
      best.iterations_used = iters;
      best.max_term_norm_product = max_prod;
      best.residual_history = std::move(history);
    }
  }
  return best;
}

RankSplit rank_split_experiment(std::int64_t n_samples, SplitMix64 &rng) {
  if (n_samples < 1)
    throw ValidationError("rank_split_experiment requires at least one sample");
  std::int64_t n2 = 0, n3 = 0, nb = 0;
  for (std::int64_t i = 0; i < n_samples; ++i) {
    SplitMix64 sub(splitmix64_scramble(rng.next()));
    DenseTensor t;
    t.dims = {2, 2, 2};
    t.values.resize(8);
    for (double &v : t.values)
      v = sub.next_normal();
    switch (classify_222(t)) {
    case Rank222::RankTwo:
      ++n2;
      break;
    case Rank222::RankThree:
      ++n3;
      break;
    case Rank222::Boundary:
      ++nb;
      break;
    }
  }
  double total = static_cast<double>(n_samples);
  return {static_cast<double>(n2) / total, static_cast<double>(n3) / total,
          static_cast<double>(nb) / total};
}

} // namespace genrank
