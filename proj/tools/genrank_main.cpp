#include <CLI11.hpp>

#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "genrank/report.hpp"

namespace {

// 0 success, 2 invalid input, 3 consensus disagreement, 4 saturation failure
int exit_code_for(const genrank::TableReport &report) {
  bool saturation = false, other_error = false, disagreement = false;
  for (const auto &cell : report.cells) {
    if (cell.error_kind == "saturation")
      saturation = true;
    else if (!cell.error.empty())
      other_error = true;
    else if (!cell.agreement)
      disagreement = true;
  }
  if (saturation)
    return 4;
  if (disagreement)
    return 3;
  if (other_error)
    return 2;
  return 0;
}

int emit(const genrank::TableReport &report, genrank::Format format,
         const std::string &out_path) {
  std::string text = genrank::render(report, format);
  if (out_path.empty()) {
    std::cout << text;
  } else {
    std::ofstream out(out_path);
    if (!out) {
      std::cerr << "error: cannot write " << out_path << "\n";
      return 2;
    }
    out << text;
  }
  return exit_code_for(report);
}

} // namespace

int main(int argc, char **argv) {
  CLI::App app{"generic rank of structured multi-way arrays via Jacobian "
               "saturation"};
  app.require_subcommand(1);
  app.fallthrough();

  std::uint64_t seed = 1;
  int trials = 3;
  std::string backend = "field";
  double tol = 1e-8;
  std::string format = "md";
  std::string out_path;
  std::string cache_path;
  if (const char *env = std::getenv("GENRANK_CACHE"))
    cache_path = env;
  int jobs = 1;

  app.add_option("--seed", seed, "base RNG seed")->capture_default_str();
  app.add_option("--trials", trials, "consensus trials per cell")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  app.add_option("--backend", backend, "rank backend")
      ->check(CLI::IsMember({"field", "float"}))
      ->capture_default_str();
  auto *tol_opt = app.add_option("--tol", tol, "relative tolerance (float backend only)")
                      ->capture_default_str();
  app.add_option("--format", format, "output format")
      ->check(CLI::IsMember({"md", "csv", "json"}))
      ->capture_default_str();
  app.add_option("--out", out_path, "write output to a file instead of stdout");
  app.add_option("--cache", cache_path,
                 "JSONL result cache (default from GENRANK_CACHE)");
  app.add_option("--jobs", jobs, "worker threads for sweeps")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();

  auto *cmd_free = app.add_subcommand("free", "array with free entries");
  std::vector<std::int64_t> dims;
  cmd_free->add_option("--dims", dims, "comma separated dimensions")
      ->required()
      ->delimiter(',');

  auto *cmd_cube = app.add_subcommand("cube", "equal-dimension free array");
  std::int64_t cube_n = 0;
  int cube_order = 3;
  cmd_cube->add_option("--n", cube_n, "dimension")->required();
  cmd_cube->add_option("--order", cube_order, "number of modes")
      ->capture_default_str();

  auto *cmd_sym = app.add_subcommand("sym", "fully symmetric array");
  std::int64_t sym_n = 0;
  int sym_order = 3;
  cmd_sym->add_option("--n", sym_n, "dimension")->required();
  cmd_sym->add_option("--order", sym_order, "number of modes")
      ->capture_default_str();

  auto *cmd_ind =
      app.add_subcommand("indscal", "third-order array with symmetric slices");
  std::int64_t ind_j = 0, ind_i = 0;
  bool ind_centered = false;
  cmd_ind->add_option("--j", ind_j, "slice dimension")->required();
  cmd_ind->add_option("--i", ind_i, "number of slices")->required();
  cmd_ind->add_flag("--centered", ind_centered,
                    "double-centered slice variant");

  auto *cmd_sweep = app.add_subcommand("sweep", "run a table preset");
  std::string preset;
  cmd_sweep->add_option("--preset", preset, "table1 .. table6")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError &e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  if (tol_opt->count() > 0 && backend != "float") {
    std::cerr << "error: --tol applies to the float backend only\n";
    return 2;
  }

  genrank::RankConfig cfg;
  cfg.seed = seed;
  cfg.trials = trials;
  if (backend == "float")
    cfg.ring = genrank::FloatTol{tol};
  else
    cfg.ring = genrank::PrimeField{};

  genrank::Format fmt = format == "csv"  ? genrank::Format::Csv
                        : format == "json" ? genrank::Format::Json
                                           : genrank::Format::Markdown;

  std::optional<genrank::ResultCache> cache;
  if (!cache_path.empty())
    cache.emplace(cache_path);
  genrank::ResultCache *cache_ptr = cache ? &*cache : nullptr;

  try {
    genrank::TableReport report;
    if (app.got_subcommand(cmd_sweep)) {
      report = genrank::run_preset(preset, cfg, jobs, cache_ptr);
    } else {
      genrank::TensorStructure s;
      if (app.got_subcommand(cmd_free))
        s = genrank::Free{dims};
      else if (app.got_subcommand(cmd_cube))
        s = genrank::Free{std::vector<std::int64_t>(
            static_cast<std::size_t>(cube_order), cube_n)};
      else if (app.got_subcommand(cmd_sym))
        s = genrank::Symmetric{sym_n, sym_order};
      else if (ind_centered)
        s = genrank::CenteredSymmetricSlices{ind_j, ind_i};
      else
        s = genrank::SymmetricSlices{ind_j, ind_i};
      report = genrank::run_single(s, cfg, cache_ptr);
    }
    return emit(report, fmt, out_path);
  } catch (const genrank::ValidationError &e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception &e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
