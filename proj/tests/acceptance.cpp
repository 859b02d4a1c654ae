// Acceptance gate: runs every published-table reproduction, the backend
// agreement and property checks, the statistical 2x2x2 experiment, and the
// runtime envelope. Prints one [PASS]/[FAIL] line per criterion and exits
// nonzero if any failed.

#include <chrono>
#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "genrank/generic_rank.hpp"
#include "genrank/jacobian.hpp"
#include "genrank/rank_engine.hpp"
#include "genrank/report.hpp"
#include "genrank/validation.hpp"

using namespace genrank;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct Gate {
  int failures = 0;

  void line(int idx, const std::string &name, bool ok,
            const std::string &detail = "") {
    std::printf("[%s] %2d %s%s%s\n", ok ? "PASS" : "FAIL", idx, name.c_str(),
                detail.empty() ? "" : ": ", detail.c_str());
    std::fflush(stdout);
    if (!ok)
      ++failures;
  }
};

const TableCell *cell_at(const TableReport &r, const std::string &row,
                         const std::string &col) {
  for (const auto &cell : r.cells)
    if (cell.row_label == row && cell.col_label == col)
      return &cell;
  return nullptr;
}

std::int64_t rank_at(const TableReport &r, const std::string &row,
                     const std::string &col) {
  const TableCell *cell = cell_at(r, row, col);
  return (cell && cell->result) ? cell->result->rank : -1;
}

std::int64_t fiber_at(const TableReport &r, const std::string &row,
                      const std::string &col) {
  const TableCell *cell = cell_at(r, row, col);
  return (cell && cell->result) ? cell->result->fiber_dim : -1;
}

std::string lbl(const char *prefix, std::int64_t v) {
  return std::string(prefix) + std::to_string(v);
}

std::int64_t ipow(std::int64_t base, std::int64_t exp) {
  std::int64_t out = 1;
  for (std::int64_t i = 0; i < exp; ++i)
    out *= base;
  return out;
}

std::int64_t binom(std::int64_t n, std::int64_t k) {
  if (k < 0 || k > n)
    return 0;
  if (k > n - k)
    k = n - k;
  std::int64_t out = 1;
  for (std::int64_t i = 1; i <= k; ++i) {
    out *= n - k + i;
    out /= i;
  }
  return out;
}

} // namespace

int main() {
  const auto suite_start = Clock::now();
  Gate gate;

  RankConfig cfg; // defaults: field backend, seed 1, trials 3
  const std::vector<std::string> preset_ids = {"table1", "table2", "table3",
                                               "table4", "table5", "table6"};
  std::map<std::string, TableReport> field;
  double table2_secs = 0.0;
  for (const auto &id : preset_ids) {
    const auto t0 = Clock::now();
    field[id] = run_preset(id, cfg);
    if (id == "table2")
      table2_secs = seconds_since(t0);
  }

  // 1. cubical arrays K = 2..9
  {
    const std::int64_t expect[8] = {2, 5, 7, 10, 14, 19, 24, 30};
    bool ok = table2_secs < 60.0;
    for (std::int64_t k = 2; k <= 9; ++k)
      ok = ok && rank_at(field["table2"], "Rbar", lbl("K=", k)) == expect[k - 2];
    char detail[64];
    std::snprintf(detail, sizeof detail, "sweep took %.1f s", table2_secs);
    gate.line(1, "cubical free arrays match the published row", ok, detail);
  }

  // 2. free I x J x K grid, smallest typical rank per cell
  {
    const std::pair<int, int> cols[8] = {{2, 2}, {2, 3}, {2, 4}, {3, 3},
                                         {3, 4}, {3, 5}, {4, 4}, {4, 5}};
    const std::int64_t expect[11][8] = {
        {2, 3, 4, 3, 4, 5, 4, 5},      {3, 3, 4, 5, 5, 5, 6, 6},
        {4, 4, 4, 5, 6, 6, 7, 8},      {4, 5, 5, 5, 6, 8, 8, 9},
        {4, 6, 6, 6, 7, 8, 8, 10},     {4, 6, 7, 7, 7, 9, 9, 10},
        {4, 6, 8, 8, 8, 9, 10, 11},    {4, 6, 8, 9, 9, 9, 10, 12},
        {4, 6, 8, 9, 10, 10, 10, 12},  {4, 6, 8, 9, 11, 11, 11, 13},
        {4, 6, 8, 9, 12, 12, 12, 13}};
    int bad = 0;
    for (std::int64_t i = 2; i <= 12; ++i)
      for (int c = 0; c < 8; ++c) {
        const std::string col =
            lbl("K=", cols[c].first) + " " + lbl("J=", cols[c].second);
        if (rank_at(field["table1"], lbl("I=", i), col) != expect[i - 2][c])
          ++bad;
      }
    gate.line(2, "88-cell free grid matches the smallest listed ranks",
              bad == 0, bad ? lbl("mismatches=", bad) : "all 88 cells");
  }

  // 3. equal-dimension arrays of order 3 and 4, with the freedom row
  {
    const std::int64_t r3[7] = {2, 5, 7, 10, 14, 19, 24};
    const std::int64_t f3[7] = {0, 8, 6, 5, 8, 18, 16};
    const std::int64_t r4[5] = {4, 9, 20, 37, 62};
    const std::int64_t f4[5] = {4, 0, 4, 4, 6};
    bool ok = true;
    for (std::int64_t n = 2; n <= 8; ++n) {
      ok = ok && rank_at(field["table3"], "L=3", lbl("N=", n)) == r3[n - 2];
      ok = ok && fiber_at(field["table3"], "L=3", lbl("N=", n)) == f3[n - 2];
    }
    for (std::int64_t n = 2; n <= 6; ++n) {
      ok = ok && rank_at(field["table3"], "L=4", lbl("N=", n)) == r4[n - 2];
      ok = ok && fiber_at(field["table3"], "L=4", lbl("N=", n)) == f4[n - 2];
    }
    // recompute F = Rbar(LN - L + 1) - N^L independently of the library
    for (const auto &cell : field["table3"].cells) {
      if (!cell.result)
        continue;
      const auto &dims = std::get<Free>(cell.structure).dims;
      const auto L = static_cast<std::int64_t>(dims.size());
      const std::int64_t n = dims[0];
      ok = ok && cell.result->fiber_dim ==
                     cell.result->rank * (L * n - L + 1) - ipow(n, L);
    }
    gate.line(3, "order-3/4 cubical ranks and freedom rows match", ok);
  }

  // 4. symmetric-slice grid
  const std::int64_t t4_expect[9][4] = {{2, 3, 4, 5}, {3, 4, 6, 7},
                                        {3, 4, 6, 8}, {3, 5, 7, 9},
                                        {3, 6, 7, 9}, {3, 6, 7, 10},
                                        {3, 6, 8, 10}, {3, 6, 9, 11},
                                        {3, 6, 10, 11}};
  {
    int bad = 0;
    for (std::int64_t i = 2; i <= 10; ++i)
      for (std::int64_t j = 2; j <= 5; ++j)
        if (rank_at(field["table4"], lbl("I=", i), lbl("J=", j)) !=
            t4_expect[i - 2][j - 2])
          ++bad;
    gate.line(4, "36-cell symmetric-slice grid matches", bad == 0,
              bad ? lbl("mismatches=", bad) : "all 36 cells");
  }

  // 5. centered grid, plus the column-reduction identity on the whole grid
  {
    const std::int64_t expect[9][4] = {{1, 2, 3, 4}, {1, 3, 4, 6},
                                       {1, 3, 4, 6}, {1, 3, 5, 7},
                                       {1, 3, 6, 7}, {1, 3, 6, 7},
                                       {1, 3, 6, 8}, {1, 3, 6, 9},
                                       {1, 3, 6, 10}};
    int bad = 0;
    bool reduction = true;
    for (std::int64_t i = 2; i <= 10; ++i)
      for (std::int64_t j = 2; j <= 5; ++j) {
        const std::int64_t got =
            rank_at(field["table5"], lbl("I=", i), lbl("J=", j));
        if (got != expect[i - 2][j - 2])
          ++bad;
        // centering one mode matches the uncentered structure one size down
        ConsensusResult small =
            consensus_rank(SymmetricSlices{j - 1, i}, cfg);
        reduction = reduction && small.result.rank == got;
      }
    gate.line(5, "36-cell centered grid matches and equals the shrunken grid",
              bad == 0 && reduction,
              bad ? lbl("mismatches=", bad)
                  : (reduction ? "grid and reduction hold" : "reduction broke"));
  }

  // 6. symmetric arrays with the freedom row
  {
    const std::int64_t r3[7] = {2, 4, 5, 8, 10, 12, 15};
    const std::int64_t f3[7] = {0, 2, 0, 5, 4, 0, 0};
    const std::int64_t r4[7] = {3, 6, 10, 15, 21, 30, 42};
    const std::int64_t f4[7] = {1, 3, 5, 5, 0, 0, 6};
    bool ok = true;
    for (std::int64_t n = 2; n <= 8; ++n) {
      ok = ok && rank_at(field["table6"], "L=3", lbl("N=", n)) == r3[n - 2];
      ok = ok && fiber_at(field["table6"], "L=3", lbl("N=", n)) == f3[n - 2];
      ok = ok && rank_at(field["table6"], "L=4", lbl("N=", n)) == r4[n - 2];
      ok = ok && fiber_at(field["table6"], "L=4", lbl("N=", n)) == f4[n - 2];
    }
    for (const auto &cell : field["table6"].cells) {
      if (!cell.result)
        continue;
      const auto &sym = std::get<Symmetric>(cell.structure);
      ok = ok && cell.result->fiber_dim ==
                     cell.result->rank * sym.n -
                         binom(sym.n + sym.order - 1, sym.order);
    }
    gate.line(6, "symmetric ranks and freedom rows match", ok);
  }

  // 7. the Jacobian image fills the structured subspace in every cell
  {
    int bad = 0, total = 0;
    for (const auto &id : preset_ids)
      for (const auto &cell : field[id].cells) {
        ++total;
        if (!cell.result ||
            cell.result->image_dim != cell.result->ambient_dim ||
            cell.result->ambient_dim != info(cell.structure).ambient_dim)
          ++bad;
      }
    gate.line(7, "image dimension equals ambient dimension on every cell",
              bad == 0, lbl("cells=", total));
  }

  // 8. float backend agrees with the field backend
  {
    RankConfig fcfg = cfg;
    fcfg.ring = FloatTol{1e-8};
    int bad = 0, total = 0;
    for (const char *id : {"table2", "table4", "table5", "table6"}) {
      TableReport fl = run_preset(id, fcfg);
      for (std::size_t i = 0; i < fl.cells.size(); ++i) {
        ++total;
        const auto &a = field[id].cells[i].result;
        const auto &b = fl.cells[i].result;
        if (!a || !b || a->rank != b->rank || a->image_dim != b->image_dim)
          ++bad;
      }
    }
    // deterministic 20-cell sample of the big free grid
    const TableReport &t1 = field["table1"];
    SplitMix64 pick(2026);
    std::set<std::size_t> chosen;
    while (chosen.size() < 20)
      chosen.insert(static_cast<std::size_t>(pick.next_below(t1.cells.size())));
    for (std::size_t idx : chosen) {
      ++total;
      const TableCell &cell = t1.cells[idx];
      RankConfig cc = fcfg;
      cc.seed = cell.cell_seed;
      ConsensusResult fl = consensus_rank(cell.structure, cc);
      if (!cell.result || fl.result.rank != cell.result->rank ||
          fl.result.image_dim != cell.result->image_dim)
        ++bad;
    }
    gate.line(8, "field and float backends agree on rank and image",
              bad == 0, lbl("cells=", total));
  }

  // 9. property suite
  {
    bool ok = true;
    std::string why;
    const FieldOps fops;

    // one generic block spans exactly params_per_term directions
    const std::vector<TensorStructure> structures = {
        Free{{4, 3, 2}},          Free{{3, 3, 3}},  Symmetric{4, 3},
        Symmetric{3, 4},          SymmetricSlices{4, 5},
        CenteredSymmetricSlices{4, 5}};
    for (const auto &s : structures) {
      const StructureInfo si = info(s);
      for (std::uint64_t seed = 1; seed <= 20 && ok; ++seed) {
        SplitMix64 g(seed);
        auto block = build_block(s, draw_term(s, g, fops), fops);
        if (batch_rank(block, fops) != si.params_per_term) {
          ok = false;
          why = "first-block rank != params_per_term for " + describe(s);
        }
      }
    }

    // each appended block adds at most params_per_term to the rank
    for (const auto &s : {TensorStructure(Free{{3, 4, 5}}),
                          TensorStructure(Symmetric{5, 3}),
                          TensorStructure(SymmetricSlices{4, 6}),
                          TensorStructure(CenteredSymmetricSlices{5, 6})}) {
      const StructureInfo si = info(s);
      SplitMix64 g(99);
      IncrementalBasis<FieldOps> basis(si.embed_cols, fops);
      std::int64_t prev = 0;
      while (ok) {
        auto block = build_block(s, draw_term(s, g, fops), fops);
        for (std::int64_t r = 0; r < block.rows(); ++r)
          basis.insert(block.row(r));
        const std::int64_t now = basis.rank();
        if (now - prev > si.params_per_term) {
          ok = false;
          why = "block increment exceeded params_per_term for " + describe(s);
        }
        if (now == prev || now == si.ambient_dim)
          break;
        prev = now;
      }
    }

    // counting bound: R >= ceil(ambient / params_per_term) on every cell
    for (const auto &id : preset_ids)
      for (const auto &cell : field[id].cells) {
        if (!ok || !cell.result)
          break;
        const StructureInfo si = info(cell.structure);
        const std::int64_t bound =
            (si.ambient_dim + si.params_per_term - 1) / si.params_per_term;
        if (cell.result->rank < bound) {
          ok = false;
          why = "counting bound broken at " + describe(cell.structure);
        }
      }

    // the free rank ignores the mode order
    {
      RankConfig one = cfg;
      one.trials = 1;
      SplitMix64 g(1789);
      for (int t = 0; t < 10 && ok; ++t) {
        std::vector<std::int64_t> dims = {
            1 + static_cast<std::int64_t>(g.next_below(6)),
            1 + static_cast<std::int64_t>(g.next_below(6)),
            1 + static_cast<std::int64_t>(g.next_below(6))};
        const std::int64_t base = generic_rank(Free{dims}, one).rank;
        std::vector<std::vector<std::int64_t>> perms = {
            {dims[0], dims[2], dims[1]}, {dims[1], dims[0], dims[2]},
            {dims[1], dims[2], dims[0]}, {dims[2], dims[0], dims[1]},
            {dims[2], dims[1], dims[0]}};
        for (const auto &p : perms)
          if (generic_rank(Free{p}, one).rank != base) {
            ok = false;
            why = "mode permutation changed the rank of " + describe(Free{dims});
          }
      }
    }

    // unfolding sandwich on the whole free grid
    for (const auto &cell : field["table1"].cells) {
      if (!ok || !cell.result)
        break;
      const auto &dims = std::get<Free>(cell.structure).dims;
      std::int64_t lower = 0, upper = INT64_MAX;
      for (std::size_t l = 0; l < dims.size(); ++l) {
        std::int64_t other = 1;
        for (std::size_t m = 0; m < dims.size(); ++m)
          if (m != l)
            other *= dims[m];
        lower = std::max(lower, std::min(dims[l], other));
        upper = std::min(upper, other);
      }
      if (cell.result->rank < lower || cell.result->rank > upper) {
        ok = false;
        why = "unfolding bounds broken at " + describe(cell.structure);
      }
    }

    // two identical runs render byte-identical json
    if (ok) {
      TableReport again = run_preset("table2", cfg);
      if (render(again, Format::Json) != render(field["table2"], Format::Json)) {
        ok = false;
        why = "same-seed reruns differ";
      }
    }

    gate.line(9, "property suite (block ranks, bounds, determinism)", ok, why);
  }

  // 10. statistical 2x2x2 experiment
  {
    bool ok = true;
    std::string why;
    SplitMix64 g(20260817);
    auto draw222 = [&] {
      DenseTensor t;
      t.dims = {2, 2, 2};
      t.values.resize(8);
      for (double &v : t.values)
        v = g.next_normal();
      return t;
    };

    int n2 = 0, n3 = 0;
    for (int i = 0; i < 200; ++i) {
      switch (classify_222(draw222())) {
      case Rank222::RankTwo:
        ++n2;
        break;
      case Rank222::RankThree:
        ++n3;
        break;
      default:
        break;
      }
    }
    if (n2 < 10 || n3 < 10) {
      ok = false;
      why = "class frequencies too small";
    }

    int fit2 = 0, fit3 = 0;
    while (ok && (fit2 < 20 || fit3 < 20)) {
      DenseTensor t = draw222();
      const Rank222 cls = classify_222(t);
      if (cls == Rank222::RankTwo && fit2 < 20) {
        FitResult fit = als_fit(t, 2);
        if (fit.relative_residual >= 1e-8 || fit.degenerate) {
          ok = false;
          why = "a rank-two sample did not fit cleanly with two terms";
        }
        ++fit2;
      } else if (cls == Rank222::RankThree && fit3 < 20) {
        FitResult three = als_fit(t, 3);
        if (three.relative_residual >= 1e-8) {
          ok = false;
          why = "a rank-three sample did not fit with three terms";
        }
        FitResult two = als_fit(t, 2);
        if (!two.degenerate && two.relative_residual <= 1e-4) {
          ok = false;
          why = "an under-rank fit looked exact without degeneracy";
        }
        ++fit3;
      }
    }
    char detail[96];
    std::snprintf(detail, sizeof detail,
                  "%d rank-2 and %d rank-3 of 200 samples%s%s", n2, n3,
                  why.empty() ? "" : "; ", why.c_str());
    gate.line(10, "2x2x2 rank split and fit behavior", ok, detail);
  }

  // 11. runtime envelope
  {
    RankConfig single = cfg;
    single.trials = 1;
    auto t0 = Clock::now();
    generic_rank(Symmetric{8, 4}, single);
    const double sym_secs = seconds_since(t0);
    t0 = Clock::now();
    generic_rank(Free{{9, 9, 9}}, single);
    const double free_secs = seconds_since(t0);
    const double total = seconds_since(suite_start);
    const bool ok =
        sym_secs < 5.0 && free_secs < 5.0 && table2_secs < 60.0 && total < 300.0;
    char detail[128];
    std::snprintf(detail, sizeof detail,
                  "sym(8,4) %.2f s, free(9,9,9) %.2f s, suite %.1f s",
                  sym_secs, free_secs, total);
    gate.line(11, "runtime envelope", ok, detail);
  }

  if (gate.failures) {
    std::printf("%d criterion(s) failed\n", gate.failures);
    return 1;
  }
  std::printf("all 11 criteria passed\n");
  return 0;
}
