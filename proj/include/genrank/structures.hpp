#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace genrank {

/// Raised for structurally invalid inputs (bad dimensions, bad arguments).
class ValidationError : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

/// Order-L array with unconstrained entries, dims[l] >= 1, L >= 2.
struct Free {
  std::vector<std::int64_t> dims;
};

/// Fully symmetric array of dimension n and order >= 2.
struct Symmetric {
  std::int64_t n = 0;
  std::int64_t order = 0;
};

/// Order-3 array of shape j x j x k whose k frontal slices are symmetric
/// j x j matrices (the INDSCAL layout). j >= 1.
struct SymmetricSlices {
  std::int64_t j = 0;
  std::int64_t k = 0;
};

/// Symmetric slices that are additionally double centered: every slice has
/// zero row and column sums. j >= 2 so that j-1 >= 1 parameters remain.
struct CenteredSymmetricSlices {
  std::int64_t j = 0;
  std::int64_t k = 0;
};

using TensorStructure =
    std::variant<Free, Symmetric, SymmetricSlices, CenteredSymmetricSlices>;

/// Dimension counts the saturation algorithm needs.
struct StructureInfo {
  std::int64_t ambient_dim = 0;     // dim of the span of the rank-one set
  std::int64_t params_per_term = 0; // essential parameters per term (M/R)
  std::int64_t block_rows = 0;      // Jacobian rows appended per term
  std::int64_t embed_cols = 0;      // columns in the full coordinate space
};

/// Throws ValidationError if the structure violates its invariants.
void validate(const TensorStructure &s);

StructureInfo info(const TensorStructure &s);

/// Stable one-line descriptor, e.g. "free(4x3x2)" or "sym(n=4,L=3)".
/// Used for cache keys and report labels.
std::string describe(const TensorStructure &s);

} // namespace genrank
