#include "genrank/generic_rank.hpp"

#include <map>
#include <utility>
#include <vector>

#include "genrank/jacobian.hpp"
#include "genrank/rank_engine.hpp"

namespace genrank {

namespace {

template <class Ops>
GenericRankResult saturate(const TensorStructure &s, const RankConfig &cfg,
                           const Ops &ops) {
  const StructureInfo si = info(s);
  const std::int64_t max_terms = cfg.max_terms.value_or(si.ambient_dim + 1);
  if (max_terms < 1)
    throw ValidationError("max_terms must be at least 1");

  SplitMix64 rng(cfg.seed);
  IncrementalBasis<Ops> basis(si.embed_cols, ops);

  std::int64_t prev_rank = 0;
  std::int64_t terms = 0;
  std::int64_t rbar = -1;
  for (;;) {
    if (terms == max_terms)
      throw SaturationError("rank did not saturate within max_terms blocks",
                            basis.rank(), terms, si.ambient_dim);
    const auto term = draw_term(s, rng, ops);
    const auto block = build_block(s, term, ops);
    for (std::int64_t r = 0; r < block.rows(); ++r)
      basis.insert(block.row(r));
    ++terms;

    const std::int64_t now = basis.rank();
    if (now > si.ambient_dim)
      throw SaturationError(
          "rank exceeded the ambient dimension (tolerance pathology)", now,
          terms, si.ambient_dim);
    if (now == si.ambient_dim) {
      rbar = terms; // saturated: one more block could not increase the rank
      break;
    }
    if (now == prev_rank) {
      rbar = terms - 1;
      break;
    }
    prev_rank = now;
  }

  GenericRankResult out;
  out.structure = s;
  out.rank = rbar;
  out.image_dim = basis.rank();
  out.params_per_term = si.params_per_term;
  out.fiber_dim = rbar * si.params_per_term - out.image_dim;
  out.ambient_dim = si.ambient_dim;
  out.terms_appended = terms;
  out.backend = describe(cfg.ring);
  out.seed = cfg.seed;
  return out;
}

} // namespace

GenericRankResult generic_rank(const TensorStructure &s,
                               const RankConfig &cfg) {
  validate(s);
  validate(cfg.ring);
  if (const auto *f = std::get_if<FloatTol>(&cfg.ring))
    return saturate(s, cfg, RealOps{f->rel_tol});
  return saturate(s, cfg, FieldOps(std::get<PrimeField>(cfg.ring).p));
}

ConsensusResult consensus_rank(const TensorStructure &s,
                               const RankConfig &cfg) {
  if (cfg.trials < 1)
    throw ValidationError("trials must be at least 1");

  std::vector<GenericRankResult> results;
  results.reserve(cfg.trials);
  for (int t = 0; t < cfg.trials; ++t) {
    RankConfig trial_cfg = cfg;
    trial_cfg.seed = trial_seed(cfg.seed, t);
    results.push_back(generic_rank(s, trial_cfg));
  }

  using Key = std::pair<std::int64_t, std::int64_t>; // (rank, image_dim)
  std::map<Key, int> votes;
  for (const auto &r : results)
    ++votes[{r.rank, r.image_dim}];

  Key best{-1, -1};
  int best_count = 0;
  for (const auto &[key, count] : votes) {
    // Plurality winner; ties resolved toward the larger rank since bad
    // draws only lose rank.
    if (count > best_count ||
        (count == best_count && key.first > best.first)) {
      best = key;
      best_count = count;
    }
  }

  ConsensusResult out;
  out.agreement = (best_count == cfg.trials);
  for (const auto &r : results)
    if (std::pair{r.rank, r.image_dim} == best) {
      out.result = r;
      break;
    }
  return out;
}

} // namespace genrank
