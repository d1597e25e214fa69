#include <cstdint>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "supplychain/config.hpp"
#include "supplychain/experiment.hpp"

namespace {

struct CommonFlags {
  std::string out;
  std::uint64_t seed_base = 0;
  int seed_count = 0;
  bool force = false;
  bool quiet = false;
};

void add_common(CLI::App* cmd, CommonFlags* flags) {
  cmd->add_option("--out", flags->out, "output directory (overrides config)");
  cmd->add_option("--seed-base", flags->seed_base,
                  "first seed (overrides config)");
  cmd->add_option("--seeds", flags->seed_count,
                  "number of seeds (overrides config)");
  cmd->add_flag("--force", flags->force,
                "write into a non-empty output directory");
  cmd->add_flag("--quiet", flags->quiet, "suppress the result document");
}

int run_mode(const std::string& config_path, const std::string& mode,
             const CommonFlags& flags) {
  supplychain::ExperimentConfig cfg =
      supplychain::parse_config_file(config_path);
  if (cfg.mode != mode) {
    std::cerr << config_path << ": mode: config declares '" << cfg.mode
              << "' but the '" << mode << "' subcommand was invoked\n";
    return 1;
  }
  if (!flags.out.empty()) cfg.out_dir = flags.out;
  if (flags.seed_count > 0) {
    cfg.seeds.clear();
    const std::uint64_t base = flags.seed_base ? flags.seed_base : 1;
    for (int i = 0; i < flags.seed_count; ++i) cfg.seeds.push_back(base + i);
  } else if (flags.seed_base > 0 && !cfg.seeds.empty()) {
    for (std::size_t i = 0; i < cfg.seeds.size(); ++i) {
      cfg.seeds[i] = flags.seed_base + i;
    }
  }
  supplychain::RunOptions opts;
  opts.force = flags.force;
  opts.quiet = flags.quiet;
  supplychain::run_experiment(cfg, opts);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Supplier-retailer game laboratory"};
  app.require_subcommand(1);

  std::string config_path, agg_dir;
  CommonFlags flags;

  CLI::App* solve = app.add_subcommand(
      "solve-se", "compute the stage game's Stackelberg equilibrium");
  solve->add_option("config", config_path, "experiment config (JSON)")
      ->required();
  add_common(solve, &flags);

  CLI::App* simulate = app.add_subcommand(
      "simulate", "run repeated-game episodes and regret aggregation");
  simulate->add_option("config", config_path, "experiment config (JSON)")
      ->required();
  add_common(simulate, &flags);

  CLI::App* adversarial = app.add_subcommand(
      "adversarial", "run Exp3-VI against an adversarial instance");
  adversarial->add_option("config", config_path, "experiment config (JSON)")
      ->required();
  add_common(adversarial, &flags);

  CLI::App* aggregate = app.add_subcommand(
      "aggregate", "rebuild the summary table from a run directory");
  aggregate->add_option("dir", agg_dir, "run directory with a manifest")
      ->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (solve->parsed()) return run_mode(config_path, "solve-se", flags);
    if (simulate->parsed()) return run_mode(config_path, "simulate", flags);
    if (adversarial->parsed()) {
      return run_mode(config_path, "adversarial", flags);
    }
    if (aggregate->parsed()) {
      std::cout << supplychain::aggregate_run_dir(agg_dir) << std::endl;
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
