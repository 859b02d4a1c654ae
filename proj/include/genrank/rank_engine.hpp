#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "genrank/matrix.hpp"
#include "genrank/scalar_ring.hpp"

namespace genrank {

template <class Ops> class IncrementalBasis;

/// Row-space basis over the reals: orthonormal rows maintained by
/// Gram-Schmidt with a second re-orthogonalization pass. A row is accepted
/// when its residual after projection exceeds rel_tol times its own norm.
template <> class IncrementalBasis<RealOps> {
public:
  IncrementalBasis(std::int64_t width, const RealOps &ops)
      : width_(width), rel_tol_(ops.rel_tol) {}

  /// Returns true iff the row increased the rank.
  bool insert(std::span<const double> row);

  std::int64_t rank() const { return static_cast<std::int64_t>(rows_.size()); }
  std::int64_t width() const { return width_; }

private:
  std::int64_t width_;
  double rel_tol_;
  std::vector<std::vector<double>> rows_;
};

/// Row-space basis mod p: echelon rows with unit pivots, kept in ascending
/// pivot-column order. Exact; rank never depends on a tolerance.
template <> class IncrementalBasis<FieldOps> {
public:
  IncrementalBasis(std::int64_t width, const FieldOps &ops)
      : width_(width), ops_(ops) {}

  /// Row entries must already be reduced to [0, p).
  bool insert(std::span<const std::uint64_t> row);

  std::int64_t rank() const { return static_cast<std::int64_t>(rows_.size()); }
  std::int64_t width() const { return width_; }

private:
  std::int64_t width_;
  FieldOps ops_;
  std::vector<std::vector<std::uint64_t>> rows_;
  std::vector<std::int64_t> pivots_; // ascending, parallel to rows_
};

std::int64_t batch_rank(const Matrix<double> &m, double rel_tol);
std::int64_t batch_rank(const Matrix<std::uint64_t> &m, const FieldOps &ops);

/// Ring-dispatched rank of a real-valued matrix. The field path requires
/// integer-valued entries (they are reduced mod p); the float path requires
/// finite entries. Violations raise ValidationError.
std::int64_t batch_rank(const Matrix<double> &m, const ScalarRing &ring);

} // namespace genrank
