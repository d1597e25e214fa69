#pragma once

#include <string>

#include "supplychain/config.hpp"

namespace supplychain {

struct RunOptions {
  bool force = false;  // allow writing into a non-empty output directory
  bool quiet = false;
};

// Dispatches on cfg.mode, writes the manifest and per-run artifacts into
// cfg.out_dir and returns the primary result document (JSON text, also
// printed unless quiet).
std::string run_experiment(const ExperimentConfig& cfg,
                           const RunOptions& opts);

// Rebuilds the per-horizon summary table from a run directory's manifest
// and trajectory files. Missing runs are listed, not fatal.
std::string aggregate_run_dir(const std::string& dir);

}  // namespace supplychain
