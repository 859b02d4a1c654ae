#pragma once

#include <cstdint>
#include <vector>

#include "genrank/rng.hpp"
#include "genrank/structures.hpp"

namespace genrank {

/// Dense real tensor, row-major flat storage (last index fastest).
struct DenseTensor {
  std::vector<std::int64_t> dims;
  std::vector<double> values;

  std::int64_t size() const {
    std::int64_t n = 1;
    for (std::int64_t d : dims)
      n *= d;
    return n;
  }
};

/// Draws a random dense tensor lying exactly in the structure's subspace:
/// free entries i.i.d. normal, slices symmetrized (and double centered for
/// the centered variant), symmetric tensors averaged over all index
/// permutations.
DenseTensor random_member(const TensorStructure &s, SplitMix64 &rng);

enum class Rank222 { RankTwo, RankThree, Boundary };

/// Real-rank classification of a 2x2x2 array via the slice pencil: the
/// roots of det(A + lambda*B). Distinct real roots -> rank two, a complex
/// pair -> rank three; repeated roots, a singular leading coefficient, or a
/// discriminant within 1e-10 of zero (relative to the coefficient scale)
/// -> boundary.
Rank222 classify_222(const DenseTensor &t);

struct AlsOptions {
  int restarts = 20;
  int max_iter = 2000;
  double conv_tol = 1e-12; // stop when the relative residual change drops below
  double blowup = 1e3;     // degeneracy cap on per-term factor norm products
  std::uint64_t seed = 0x5eedfa27ULL;
};

struct FitResult {
  double relative_residual = 0.0;
  bool degenerate = false;
  int iterations_used = 0;
  double max_term_norm_product = 0.0;
  std::vector<double> residual_history; // per sweep, best restart
};

/// Alternating least squares fit with r terms; best result over restarts.
/// Degeneracy fires when some term's product of factor column norms exceeds
/// blowup times the tensor norm at termination, which is the reliable
/// signal when diverging components cancel.
FitResult als_fit(const DenseTensor &t, std::int64_t r,
                  const AlsOptions &opts = {});

struct RankSplit {
  double rank2 = 0.0;
  double rank3 = 0.0;
  double boundary = 0.0;
};

/// Classifies n_samples standard-normal 2x2x2 tensors; fractions sum to 1.
RankSplit rank_split_experiment(std::int64_t n_samples, SplitMix64 &rng);

} // namespace genrank
