#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>

#include "genrank/scalar_ring.hpp"
#include "genrank/structures.hpp"

namespace genrank {

struct RankConfig {
  ScalarRing ring = PrimeField{};
  std::uint64_t seed = 1;
  int trials = 3;
  // Cap on appended terms; defaults to ambient_dim + 1, within which the
  // loop always terminates on the exact backend.
  std::optional<std::int64_t> max_terms;
};

struct GenericRankResult {
  TensorStructure structure;
  std::int64_t rank = 0;            // Rbar, smallest typical / generic rank
  std::int64_t image_dim = 0;       // D, final Jacobian rank
  std::int64_t fiber_dim = 0;       // F = rank * params_per_term - image_dim
  std::int64_t ambient_dim = 0;
  std::int64_t params_per_term = 0;
  std::int64_t terms_appended = 0;
  std::string backend;
  std::uint64_t seed = 0;
};

/// Raised when max_terms blocks were appended without the rank saturating
/// or plateauing; carries the partial state for diagnosis. On the float
/// backend this signals a tolerance pathology.
class SaturationError : public std::runtime_error {
public:
  SaturationError(const std::string &msg, std::int64_t rank_so_far,
                  std::int64_t terms_appended, std::int64_t ambient_dim)
      : std::runtime_error(msg), rank_so_far(rank_so_far),
        terms_appended(terms_appended), ambient_dim(ambient_dim) {}

  std::int64_t rank_so_far;
  std::int64_t terms_appended;
  std::int64_t ambient_dim;
};

/// Single-trial saturation: append random Jacobian blocks while the basis
/// rank strictly increases; stop early once the rank reaches the ambient
/// dimension. Deterministic in (s, cfg).
GenericRankResult generic_rank(const TensorStructure &s,
                               const RankConfig &cfg);

struct ConsensusResult {
  GenericRankResult result;
  bool agreement = true; // all trials matched in (rank, image_dim)
};

/// Runs cfg.trials independent trials (trial 0 reuses cfg.seed; trial i
/// uses a SplitMix64 scramble of seed and i) and returns the plurality
/// result, preferring the larger rank on ties: on the exact backend a bad
/// draw can only under-estimate the generic Jacobian rank.
ConsensusResult consensus_rank(const TensorStructure &s,
                               const RankConfig &cfg);

} // namespace genrank
