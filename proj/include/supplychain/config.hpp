#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "supplychain/distributions.hpp"

namespace supplychain {

struct DistributionSpec {
  std::string family;  // uniform | weibull | trunc_exp
  double c = 0, p = 0;
  double lambda = 1, k = 1;  // weibull
  double rate = 1;           // trunc_exp

  JointDistribution build() const;
};

struct ExperimentConfig {
  std::string mode;  // solve-se | simulate | adversarial

  DistributionSpec distribution;

  // simulate
  std::string supplier;  // etc | piyavskii | etc_nocost
  std::string retailer;  // exact_br | ftl
  std::vector<int> horizons;
  std::vector<std::uint64_t> seeds;
  std::vector<std::string> bounds;  // thm2 | thm4 | thm5

  // adversarial
  std::string instance_kind;  // file | iid_uniform_posted_price
  std::string instance_file;
  int instance_horizon = 0;
  double gamma = 0;  // 0 -> T^{-1/3}
  double eta = 0;    // 0 -> T^{-2/3}

  std::string out_dir;

  // canonical JSON echo with sorted keys, timestamp-free; hashed into the
  // manifest
  std::string canonical_json() const;
  std::string content_hash() const;
};

// Parses and validates; throws std::runtime_error with a field diagnostic.
ExperimentConfig parse_config_file(const std::string& path);
ExperimentConfig parse_config_json(const std::string& text,
                                   const std::string& origin = "<config>");

}  // namespace supplychain
