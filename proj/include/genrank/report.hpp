#pragma once

#include <cstdint>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "genrank/generic_rank.hpp"
#include "genrank/structures.hpp"

namespace genrank {

struct PresetCell {
  std::string row_label;
  std::string col_label;
  TensorStructure structure;
};

/// One of the built-in sweep grids (table1 .. table6).
struct TablePreset {
  std::string id;
  bool show_fiber = false; // render a second grid with fiber dimensions
  std::vector<PresetCell> cells;
};

TablePreset make_preset(const std::string &id);

struct TableCell {
  std::string row_label;
  std::string col_label;
  TensorStructure structure;
  std::optional<GenericRankResult> result;
  bool agreement = true;
  std::string error;      // empty on success
  std::string error_kind; // "saturation" | "validation" | "error"
  double wall_ms = 0.0;   // informational only, never rendered to json
  std::uint64_t cell_seed = 0;
};

struct TableReport {
  std::string preset;
  std::uint64_t seed = 0;
  std::string backend;
  int trials = 0;
  std::vector<TableCell> cells;
};

enum class Format { Markdown, Csv, Json };

/// Append-only JSONL result store keyed by (structure, backend) descriptors.
/// Corrupt lines are skipped with a warning; an unreadable file disables the
/// cache instead of failing the run.
class ResultCache {
public:
  struct Entry {
    std::int64_t rank = 0;
    std::int64_t image_dim = 0;
    std::int64_t fiber_dim = 0;
    std::int64_t ambient_dim = 0;
    std::int64_t params_per_term = 0;
    std::int64_t terms_appended = 0;
    std::uint64_t seed = 0;
    int trials = 0;
    bool agreement = true;
    std::string backend;
  };

  explicit ResultCache(std::string path);

  bool enabled() const { return enabled_; }
  std::optional<Entry> lookup(const std::string &structure_key,
                              const std::string &backend_key);
  void store(const std::string &structure_key, const std::string &backend_key,
             const Entry &entry);

private:
  std::string path_;
  bool enabled_ = true;
  std::mutex mutex_;
  std::map<std::string, Entry> entries_;
};

/// Sub-seed for one grid cell, a function of (seed, preset id, structure)
/// only, so results do not depend on scheduling or grid position.
std::uint64_t cell_seed(std::uint64_t seed, const std::string &preset_id,
                        const TensorStructure &s);

/// Runs every cell of a preset through consensus_rank on a bounded worker
/// pool. Per-cell failures are recorded in the report, not thrown.
TableReport run_preset(const std::string &id, const RankConfig &cfg,
                       int parallelism = 1, ResultCache *cache = nullptr);

/// Single-structure report (preset id "single") using cfg.seed directly.
TableReport run_single(const TensorStructure &s, const RankConfig &cfg,
                       ResultCache *cache = nullptr);

std::string render(const TableReport &report, Format format);

} // namespace genrank
