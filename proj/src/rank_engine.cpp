#include "genrank/rank_engine.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>

#include <Eigen/Dense>
#include <Eigen/SVD>

namespace genrank {

bool IncrementalBasis<RealOps>::insert(std::span<const double> row) {
  if (static_cast<std::int64_t>(row.size()) != width_)
    throw ValidationError("row width does not match basis");

  double norm0 = 0.0;
  for (double v : row)
    norm0 += v * v;
  norm0 = std::sqrt(norm0);
  if (norm0 == 0.0)
    return false;

  std::vector<double> w(row.begin(), row.end());
  for (int pass = 0; pass < 2; ++pass) {
    for (const auto &q : rows_) {
      double dot = 0.0;
      for (std::int64_t i = 0; i < width_; ++i)
        dot += w[i] * q[i];
      for (std::int64_t i = 0; i < width_; ++i)
        w[i] -= dot * q[i];
    }
  }

  double res = 0.0;
  for (double v : w)
    res += v * v;
  res = std::sqrt(res);
  if (res <= rel_tol_ * norm0)
    return false;

  for (double &v : w)
    v /= res;
  rows_.push_back(std::move(w));
  return true;
}

bool IncrementalBasis<FieldOps>::insert(std::span<const std::uint64_t> row) {
  if (static_cast<std::int64_t>(row.size()) != width_)
    throw ValidationError("row width does not match basis");

  std::vector<std::uint64_t> w(row.begin(), row.end());
  // Eliminate against pivots in ascending column order; echelon rows have
  // zeros left of their pivot so each step starts at the pivot column.
  for (std::size_t r = 0; r < rows_.size(); ++r) {
    const std::int64_t piv = pivots_[r];
    const std::uint64_t coef = w[piv];
    if (coef == 0)
      continue;
    const auto &brow = rows_[r];
    for (std::int64_t i = piv; i < width_; ++i)
      w[i] = ops_.sub(w[i], ops_.mul(coef, brow[i]));
  }

  std::int64_t pivot = -1;
  for (std::int64_t i = 0; i < width_; ++i)
    if (w[i] != 0) {
      pivot = i;
      break;
    }
  if (pivot < 0)
    return false;

  const std::uint64_t scale = ops_.inv(w[pivot]);
  for (std::int64_t i = pivot; i < width_; ++i)
    w[i] = ops_.mul(w[i], scale);

  auto pos = std::upper_bound(pivots_.begin(), pivots_.end(), pivot);
  const auto idx = pos - pivots_.begin();
  pivots_.insert(pos, pivot);
  rows_.insert(rows_.begin() + idx, std::move(w));
  return true;
}

std::int64_t batch_rank(const Matrix<double> &m, double rel_tol) {
  if (m.rows() == 0 || m.cols() == 0)
    return 0;
  for (double v : m.data())
    if (!std::isfinite(v))
      throw ValidationError("matrix has non-finite entries");

  Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic,
                                 Eigen::RowMajor>>
      map(m.data().data(), m.rows(), m.cols());
  Eigen::BDCSVD<Eigen::MatrixXd> svd(map);
  const auto &sv = svd.singularValues();
  if (sv.size() == 0)
    return 0;
  const double cutoff = rel_tol * sv(0);
  std::int64_t rank = 0;
  for (Eigen::Index i = 0; i < sv.size(); ++i)
    if (sv(i) > cutoff)
      ++rank;
  return rank;
}

std::int64_t batch_rank(const Matrix<std::uint64_t> &m, const FieldOps &ops) {
  if (m.rows() == 0 || m.cols() == 0)
    return 0;
  IncrementalBasis<FieldOps> basis(m.cols(), ops);
  for (std::int64_t i = 0; i < m.rows(); ++i)
    basis.insert(m.row(i));
  return basis.rank();
}

std::int64_t batch_rank(const Matrix<double> &m, const ScalarRing &ring) {
  if (const auto *f = std::get_if<FloatTol>(&ring))
    return batch_rank(m, f->rel_tol);

  const FieldOps ops(std::get<PrimeField>(ring).p);
  Matrix<std::uint64_t> reduced(m.rows(), m.cols());
  for (std::int64_t i = 0; i < m.rows(); ++i)
    for (std::int64_t j = 0; j < m.cols(); ++j) {
      const double v = m(i, j);
      if (!std::isfinite(v) || v != std::floor(v) || std::abs(v) > 0x1p53)
        throw ValidationError(
            "field-backend rank needs integer-valued entries");
      reduced(i, j) = ops.reduce(static_cast<std::int64_t>(v));
    }
  return batch_rank(reduced, ops);
}

} // namespace genrank
