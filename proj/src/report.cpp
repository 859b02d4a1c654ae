#include "genrank/report.hpp"

#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <thread>

#include "genrank/rng.hpp"

namespace genrank {

namespace {

std::string label(const char *prefix, std::int64_t v) {
  return std::string(prefix) + std::to_string(v);
}

} // namespace

TablePreset make_preset(const std::string &id) {
  TablePreset p;
  p.id = id;
  if (id == "table1") {
    // columns follow the slice count K, then the middle dimension J
    const std::pair<int, int> cols[] = {{2, 2}, {2, 3}, {2, 4}, {3, 3},
                                        {3, 4}, {3, 5}, {4, 4}, {4, 5}};
    for (std::int64_t i = 2; i <= 12; ++i)
      for (auto [k, j] : cols)
        p.cells.push_back({label("I=", i),
                           label("K=", k) + " " + label("J=", j),
                           Free{{i, j, k}}});
  } else if (id == "table2") {
    for (std::int64_t k = 2; k <= 9; ++k)
      p.cells.push_back({"Rbar", label("K=", k), Free{{k, k, k}}});
  } else if (id == "table3") {
    p.show_fiber = true;
    for (std::int64_t n = 2; n <= 8; ++n)
      p.cells.push_back({"L=3", label("N=", n), Free{{n, n, n}}});
    for (std::int64_t n = 2; n <= 6; ++n)
      p.cells.push_back({"L=4", label("N=", n), Free{{n, n, n, n}}});
  } else if (id == "table4" || id == "table5") {
    const bool centered = id == "table5";
    for (std::int64_t i = 2; i <= 10; ++i)
      for (std::int64_t j = 2; j <= 5; ++j) {
        TensorStructure s = centered
                                ? TensorStructure(CenteredSymmetricSlices{j, i})
                                : TensorStructure(SymmetricSlices{j, i});
        p.cells.push_back({label("I=", i), label("J=", j), s});
      }
  } else if (id == "table6") {
    p.show_fiber = true;
    for (int l = 3; l <= 4; ++l)
      for (std::int64_t n = 2; n <= 8; ++n)
        p.cells.push_back({label("L=", l), label("N=", n), Symmetric{n, l}});
  } else {
    throw ValidationError("unknown preset: " + id);
  }
  for (const auto &cell : p.cells)
    validate(cell.structure);
  return p;
}

std::uint64_t cell_seed(std::uint64_t seed, const std::string &preset_id,
                        const TensorStructure &s) {
  std::string key = preset_id + ":" + describe(s);
  return splitmix64_scramble(seed ^ fnv1a64(key.data(), key.size()));
}

ResultCache::ResultCache(std::string path) : path_(std::move(path)) {
  std::error_code ec;
  if (!std::filesystem::exists(path_, ec))
    return; // fresh cache, created on first store
  std::ifstream in(path_);
  if (!in) {
    std::fprintf(stderr, "warning: cache file %s is unreadable, caching disabled\n",
                 path_.c_str());
    enabled_ = false;
    return;
  }
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty())
      continue;
    nlohmann::json doc = nlohmann::json::parse(line, nullptr, false);
    bool ok = !doc.is_discarded() && doc.is_object();
    Entry e;
    std::string skey;
    if (ok) {
      try {
        skey = doc.at("structure").get<std::string>();
        e.backend = doc.at("backend").get<std::string>();
        e.rank = doc.at("rank").get<std::int64_t>();
        e.image_dim = doc.at("image_dim").get<std::int64_t>();
        e.fiber_dim = doc.at("fiber_dim").get<std::int64_t>();
        e.ambient_dim = doc.at("ambient_dim").get<std::int64_t>();
        e.params_per_term = doc.at("params_per_term").get<std::int64_t>();
        e.terms_appended = doc.at("terms_appended").get<std::int64_t>();
        e.seed = doc.at("seed").get<std::uint64_t>();
        e.trials = doc.at("trials").get<int>();
        e.agreement = doc.at("agreement").get<bool>();
      } catch (const nlohmann::json::exception &) {
        ok = false;
      }
    }
    if (!ok) {
      std::fprintf(stderr, "warning: skipping corrupt cache line %zu in %s\n",
                   lineno, path_.c_str());
      continue;
    }
    entries_[skey + "|" + e.backend] = e;
  }
}

std::optional<ResultCache::Entry>
ResultCache::lookup(const std::string &structure_key,
                    const std::string &backend_key) {
  std::lock_guard lock(mutex_);
  if (!enabled_)
    return std::nullopt;
  auto it = entries_.find(structure_key + "|" + backend_key);
  if (it == entries_.end())
    return std::nullopt;
  return it->second;
}

void ResultCache::store(const std::string &structure_key,
                        const std::string &backend_key, const Entry &entry) {
  std::lock_guard lock(mutex_);
  if (!enabled_)
    return;
  nlohmann::json doc{{"structure", structure_key},
                     {"backend", backend_key},
                     {"rank", entry.rank},
                     {"image_dim", entry.image_dim},
                     {"fiber_dim", entry.fiber_dim},
                     {"ambient_dim", entry.ambient_dim},
                     {"params_per_term", entry.params_per_term},
                     {"terms_appended", entry.terms_appended},
                     {"seed", entry.seed},
                     {"trials", entry.trials},
                     {"agreement", entry.agreement}};
  std::ofstream out(path_, std::ios::app);
  if (!out) {
    std::fprintf(stderr, "warning: cache file %s is not writable, caching disabled\n",
                 path_.c_str());
    enabled_ = false;
    return;
  }
  out << doc.dump() << "\n";
  entries_[structure_key + "|" + backend_key] = entry;
}

namespace {

void run_cell(TableCell &cell, const RankConfig &cfg, ResultCache *cache) {
  auto t0 = std::chrono::steady_clock::now();
  const std::string skey = describe(cell.structure);
  const std::string bkey = describe(cfg.ring);
  if (cache && cache->enabled()) {
    if (auto hit = cache->lookup(skey, bkey)) {
      GenericRankResult r;
      r.structure = cell.structure;
      r.rank = hit->rank;
      r.image_dim = hit->image_dim;
      r.fiber_dim = hit->fiber_dim;
      r.ambient_dim = hit->ambient_dim;
      r.params_per_term = hit->params_per_term;
      r.terms_appended = hit->terms_appended;
      r.backend = hit->backend;
      r.seed = hit->seed;
      cell.result = r;
      cell.agreement = hit->agreement;
      cell.cell_seed = hit->seed;
      cell.wall_ms = std::chrono::duration<double, std::milli>(
                         std::chrono::steady_clock::now() - t0)
                         .count();
      return;
    }
  }
  RankConfig cc = cfg;
  cc.seed = cell.cell_seed;
  try {
    ConsensusResult cr = consensus_rank(cell.structure, cc);
    cell.result = cr.result;
    cell.agreement = cr.agreement;
    if (cache && cache->enabled()) {
      ResultCache::Entry e;
      e.rank = cr.result.rank;
      e.image_dim = cr.result.image_dim;
      e.fiber_dim = cr.result.fiber_dim;
      e.ambient_dim = cr.result.ambient_dim;
      e.params_per_term = cr.result.params_per_term;
      e.terms_appended = cr.result.terms_appended;
      e.seed = cell.cell_seed;
      e.trials = cfg.trials;
      e.agreement = cr.agreement;
      e.backend = cr.result.backend;
      cache->store(skey, bkey, e);
    }
  } catch (const SaturationError &e) {
    cell.error = e.what();
    cell.error_kind = "saturation";
    cell.agreement = false;
  } catch (const ValidationError &e) {
    cell.error = e.what();
    cell.error_kind = "validation";
    cell.agreement = false;
  } catch (const std::exception &e) {
    cell.error = e.what();
    cell.error_kind = "error";
    cell.agreement = false;
  }
  cell.wall_ms = std::chrono::duration<double, std::milli>(
                     std::chrono::steady_clock::now() - t0)
                     .count();
}

} // namespace

TableReport run_preset(const std::string &id, const RankConfig &cfg,
                       int parallelism, ResultCache *cache) {
  if (parallelism < 1)
    throw ValidationError("parallelism must be positive");
  validate(cfg.ring);
  TablePreset preset = make_preset(id);

  TableReport report;
  report.preset = id;
  report.seed = cfg.seed;
  report.backend = describe(cfg.ring);
  report.trials = cfg.trials;
  report.cells.reserve(preset.cells.size());
  for (const auto &pc : preset.cells) {
    TableCell cell;
    cell.row_label = pc.row_label;
    cell.col_label = pc.col_label;
    cell.structure = pc.structure;
    cell.cell_seed = cell_seed(cfg.seed, id, pc.structure);
    report.cells.push_back(std::move(cell));
  }

  const std::size_t workers = std::min<std::size_t>(
      static_cast<std::size_t>(parallelism), report.cells.size());
  if (workers <= 1) {
    for (auto &cell : report.cells)
      run_cell(cell, cfg, cache);
    return report;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w)
    pool.emplace_back([&] {
      for (;;) {
        std::size_t i = next.fetch_add(1);
        if (i >= report.cells.size())
          return;
        run_cell(report.cells[i], cfg, cache);
      }
    });
  for (auto &t : pool)
    t.join();
  return report;
}

TableReport run_single(const TensorStructure &s, const RankConfig &cfg,
                       ResultCache *cache) {
  validate(s);
  validate(cfg.ring);
  TableReport report;
  report.preset = "single";
  report.seed = cfg.seed;
  report.backend = describe(cfg.ring);
  report.trials = cfg.trials;
  TableCell cell;
  cell.row_label = describe(s);
  cell.col_label = "";
  cell.structure = s;
  cell.cell_seed = cfg.seed;
  run_cell(cell, cfg, cache);
  report.cells.push_back(std::move(cell));
  return report;
}

namespace {

// Stable-unique row and column label orders as they appear in the grid.
void collect_labels(const TableReport &r, std::vector<std::string> &rows,
                    std::vector<std::string> &cols) {
  for (const auto &cell : r.cells) {
    if (std::find(rows.begin(), rows.end(), cell.row_label) == rows.end())
      rows.push_back(cell.row_label);
    if (std::find(cols.begin(), cols.end(), cell.col_label) == cols.end())
      cols.push_back(cell.col_label);
  }
}

const TableCell *find_cell(const TableReport &r, const std::string &row,
                           const std::string &col) {
  for (const auto &cell : r.cells)
    if (cell.row_label == row && cell.col_label == col)
      return &cell;
  return nullptr;
}

void render_grid(std::ostringstream &out, const TableReport &r,
                 const std::vector<std::string> &rows,
                 const std::vector<std::string> &cols, bool fiber) {
  out << "|  |";
  for (const auto &c : cols)
    out << " " << c << " |";
  out << "\n|---|";
  for (std::size_t i = 0; i < cols.size(); ++i)
    out << "---|";
  out << "\n";
  for (const auto &row : rows) {
    out << "| " << row << " |";
    for (const auto &col : cols) {
      const TableCell *cell = find_cell(r, row, col);
      out << " ";
      if (!cell) {
        out << " |";
        continue;
      }
      if (!cell->error.empty())
        out << "ERR";
      else if (cell->result)
        out << (fiber ? cell->result->fiber_dim : cell->result->rank);
      if (!cell->agreement && cell->error.empty())
        out << "?";
      out << " |";
    }
    out << "\n";
  }
}

std::string render_markdown(const TableReport &r) {
  std::vector<std::string> rows, cols;
  collect_labels(r, rows, cols);
  std::ostringstream out;
  out << "## " << r.preset << "\n\n";
  out << "backend: " << r.backend << ", seed: " << r.seed
      << ", trials: " << r.trials << "\n\n";
  render_grid(out, r, rows, cols, false);
  bool fiber = r.preset == "table3" || r.preset == "table6";
  if (fiber) {
    out << "\nremaining degrees of freedom F\n\n";
    render_grid(out, r, rows, cols, true);
  }
  return out.str();
}

std::string render_csv(const TableReport &r) {
  std::ostringstream out;
  out << "preset,row,col,rank,image_dim,fiber_dim,ambient_dim,agreement,seed\n";
  for (const auto &cell : r.cells) {
    out << r.preset << "," << cell.row_label << "," << cell.col_label << ",";
    if (cell.result)
      out << cell.result->rank << "," << cell.result->image_dim << ","
          << cell.result->fiber_dim << "," << cell.result->ambient_dim;
    else
      out << ",,," << info(cell.structure).ambient_dim;
    out << "," << (cell.agreement ? "true" : "false") << "," << cell.cell_seed
        << "\n";
  }
  return out.str();
}

std::string render_json(const TableReport &r) {
  nlohmann::json doc;
  doc["preset"] = r.preset;
  doc["seed"] = r.seed;
  doc["backend"] = r.backend;
  doc["trials"] = r.trials;
  doc["cells"] = nlohmann::json::array();
  for (const auto &cell : r.cells) {
    nlohmann::json c;
    c["row"] = cell.row_label;
    c["col"] = cell.col_label;
    c["structure"] = describe(cell.structure);
    c["agreement"] = cell.agreement;
    c["seed"] = cell.cell_seed;
    c["backend"] = r.backend;
    c["trials"] = r.trials;
    if (cell.result) {
      c["rank"] = cell.result->rank;
      c["image_dim"] = cell.result->image_dim;
      c["fiber_dim"] = cell.result->fiber_dim;
      c["ambient_dim"] = cell.result->ambient_dim;
      c["params_per_term"] = cell.result->params_per_term;
      c["terms_appended"] = cell.result->terms_appended;
    }
    if (!cell.error.empty()) {
      c["error"] = cell.error;
      c["error_kind"] = cell.error_kind;
    }
    doc["cells"].push_back(std::move(c));
  }
  return doc.dump(2) + "\n";
}

} // namespace

std::string render(const TableReport &report, Format format) {
  switch (format) {
  case Format::Markdown:
    return render_markdown(report);
  case Format::Csv:
    return render_csv(report);
  case Format::Json:
    return render_json(report);
  }
  throw ValidationError("unknown output format");
}

} // namespace genrank
