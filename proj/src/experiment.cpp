#include "supplychain/experiment.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <stdexcept>
#include <vector>

#include "json.hpp"
#include "supplychain/repeated_game.hpp"
#include "supplychain/vertical_integration.hpp"

namespace supplychain {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

void ensure_out_dir(const std::string& dir, bool force) {
  if (dir.empty()) {
    throw std::runtime_error("out: an output directory is required");
  }
  if (fs::exists(dir) && !fs::is_empty(dir) && !force) {
    throw std::runtime_error("out: directory '" + dir +
                             "' is not empty; pass --force to overwrite");
  }
  fs::create_directories(dir);
}

json stats_of(const std::vector<double>& xs) {
  double mean = 0;
  for (double x : xs) mean += x;
  mean /= static_cast<double>(xs.size());
  double var = 0;
  double lo = xs.front(), hi = xs.front();
  for (double x : xs) {
    var += (x - mean) * (x - mean);
    lo = std::min(lo, x);
    hi = std::max(hi, x);
  }
  const double std_dev =
      xs.size() > 1 ? std::sqrt(var / static_cast<double>(xs.size() - 1)) : 0.0;
  json j;
  j["mean"] = mean;
  j["std"] = std_dev;
  j["min"] = lo;
  j["max"] = hi;
  return j;
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path);
  out << text;
}

void write_manifest(const ExperimentConfig& cfg,
                    const std::vector<std::string>& files) {
  json m;
  m["config"] = json::parse(cfg.canonical_json());
  m["content_hash"] = cfg.content_hash();
  m["files"] = files;
  // informational only; excluded from the content hash
  m["timestamp"] = static_cast<long long>(
      std::chrono::duration_cast<std::chrono::seconds>(
          std::chrono::system_clock::now().time_since_epoch())
          .count());
  write_text(cfg.out_dir + "/manifest.json", m.dump(2) + "\n");
}

std::unique_ptr<SupplierPolicy> make_supplier(const ExperimentConfig& cfg,
                                              const JointDistribution& dist,
                                              int horizon) {
  if (cfg.supplier == "etc") {
    return std::make_unique<EtcSupplier>(horizon, dist.expected_cost());
  }
  if (cfg.supplier == "piyavskii") {
    const double m = lipschitz_bound(dist.expected_cost(),
                                     dist.expected_price(),
                                     dist.density_floor());
    return std::make_unique<PiyavskiiSupplier>(horizon, m,
                                               dist.expected_cost());
  }
  if (cfg.supplier == "etc_nocost") {
    return std::make_unique<EtcNoCostSupplier>(horizon);
  }
  throw std::runtime_error("unknown supplier policy " + cfg.supplier);
}

std::unique_ptr<RetailerPolicy> make_retailer(const ExperimentConfig& cfg,
                                              const JointDistribution& dist,
                                              int horizon, SplitRng rng) {
  if (cfg.retailer == "exact_br") {
    return std::make_unique<ExactBestResponseRetailer>(dist);
  }
  if (cfg.retailer == "ftl") {
    return std::make_unique<FtlRetailer>(horizon, rng);
  }
  throw std::runtime_error("unknown retailer policy " + cfg.retailer);
}

TheoremBound bound_id_of(const std::string& name) {
  if (name == "thm2") return TheoremBound::Thm2Supplier;
  if (name == "thm4") return TheoremBound::Thm4;
  if (name == "thm5") return TheoremBound::Thm5;
  throw std::runtime_error("unknown bound id " + name);
}

std::string traj_file_name(int horizon, std::uint64_t seed) {
  return "traj_T" + std::to_string(horizon) + "_seed" + std::to_string(seed) +
         ".csv";
}

std::string vi_file_name(std::uint64_t seed) {
  return "vi_seed" + std::to_string(seed) + ".csv";
}

json solve_se_document(const JointDistribution& dist) {
  const StackelbergEquilibrium se = solve_equilibrium(dist);
  const WelfareReport welfare = price_of_anarchy(dist, se);
  json out;
  out["w_star"] = se.w_star;
  out["q_star"] = se.q_star;
  out["supplier_utility"] = se.supplier_utility;
  out["retailer_utility"] = se.retailer_utility;
  out["stationary_points"] = se.stationary_points;
  out["unique"] = se.unique;
  out["poa"] = welfare.price_of_anarchy;
  out["optimal_welfare"] = welfare.optimal_welfare;
  out["equilibrium_welfare"] = welfare.equilibrium_welfare;
  out["integrated_quantity"] = welfare.integrated_quantity;
  return out;
}

json simulate_rows(const ExperimentConfig& cfg, const std::string& dir,
                   std::vector<std::string>* files, json* missing) {
  const JointDistribution dist = cfg.distribution.build();
  const StackelbergEquilibrium se = solve_equilibrium(dist);
  BoundParams params;
  params.expected_cost = dist.expected_cost();
  params.expected_price = dist.expected_price();
  params.density_floor = dist.density_floor();
  params.lipschitz = lipschitz_bound(
      dist.expected_cost(), dist.expected_price(), dist.density_floor());

  json rows = json::array();
  for (std::size_t hi = 0; hi < cfg.horizons.size(); ++hi) {
    const int T = cfg.horizons[hi];
    std::vector<double> sup_regret, ret_regret, l1;
    for (std::uint64_t seed : cfg.seeds) {
      const std::string name = traj_file_name(T, seed);
      const std::string path = dir + "/" + name;
      Trajectory traj;
      if (files) {
        SplitRng root(seed);
        auto supplier = make_supplier(cfg, dist, T);
        auto retailer =
            make_retailer(cfg, dist, T, root.substream(2 * hi + 1));
        traj = run_episode(dist, *supplier, *retailer, T,
                           root.substream(2 * hi));
        write_trajectory_csv(traj, path);
        files->push_back(name);
      } else {
        if (!fs::exists(path)) {
          if (missing) missing->push_back(name);
          continue;
        }
        traj = read_trajectory_csv(path);
      }
      sup_regret.push_back(supplier_regret(traj, se, dist));
      ret_regret.push_back(retailer_regret(traj, se, dist));
      l1.push_back(l1_last_iterate(traj, se));
    }
    json row;
    row["horizon"] = T;
    row["seeds"] = sup_regret.size();
    if (!sup_regret.empty()) {
      row["supplier_regret"] = stats_of(sup_regret);
      row["retailer_regret"] = stats_of(ret_regret);
      row["l1_last_iterate"] = stats_of(l1);
      if (sup_regret.size() == 1) row["small_sample_warning"] = true;
      json bound_vals = json::object();
      for (const std::string& b : cfg.bounds) {
        bound_vals[b] = bound_value(bound_id_of(b), params, T);
      }
      row["bounds"] = bound_vals;
      if (!cfg.bounds.empty()) {
        const double bound =
            bound_value(bound_id_of(cfg.bounds.front()), params, T);
        std::size_t ok = 0;
        for (double r : sup_regret) ok += (r <= bound);
        row["compliance"] =
            static_cast<double>(ok) / static_cast<double>(sup_regret.size());
      }
    }
    rows.push_back(row);
  }
  return rows;
}

json adversarial_rows(const ExperimentConfig& cfg, const std::string& dir,
                      std::vector<std::string>* files, json* missing) {
  json rows = json::array();
  std::vector<double> regrets, bounds;
  std::size_t compliant = 0, counted = 0;
  for (std::uint64_t seed : cfg.seeds) {
    const std::string name = vi_file_name(seed);
    const std::string path = dir + "/" + name;
    double cum_regret = 0, bound = 0;
    if (files) {
      AdversarialInstance inst;
      SplitRng root(seed);
      if (cfg.instance_kind == "file") {
        inst = read_instance_file(cfg.instance_file);
      } else {
        inst = make_iid_uniform_posted_price(cfg.instance_horizon,
                                             root.substream(0));
      }
      const int T = inst.horizon();
      const double gamma =
          cfg.gamma > 0 ? cfg.gamma : std::pow(static_cast<double>(T), -1.0 / 3.0);
      const double eta =
          cfg.eta > 0 ? cfg.eta : std::pow(static_cast<double>(T), -2.0 / 3.0);
      const VIResult res = run_adversarial(inst, gamma, eta,
                                           root.substream(1));
      const FixedAction fixed = best_fixed_action(inst);

      std::ofstream out(path);
      if (!out) throw std::runtime_error("cannot open " + path);
      out << "t,I,J,P,Q,feedback,welfare,cumulative_regret,bound_value\n";
      const int K = static_cast<int>(std::ceil(1.0 / gamma));
      double bench_prefix = 0, realized_prefix = 0;
      char buf[320];
      for (const VIRoundRecord& r : res.rounds) {
        bench_prefix += welfare(fixed.p, fixed.q, inst.costs[r.t - 1],
                                inst.demands[r.t - 1](fixed.p));
        realized_prefix += r.welfare;
        const double bt = eta * K * r.t * std::log(std::exp(1.0) * K / gamma) +
                          4.0 * std::log(static_cast<double>(K + 1)) / eta +
                          4.0 * gamma * r.t;
        std::snprintf(buf, sizeof(buf),
                      "%d,%d,%d,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n", r.t,
                      r.i, r.j, r.price, r.quantity, r.feedback, r.welfare,
                      bench_prefix - realized_prefix, bt);
        out << buf;
      }
      files->push_back(name);
      cum_regret = res.cumulative_regret;
      bound = res.eq5_bound;
    } else {
      if (!fs::exists(path)) {
        if (missing) missing->push_back(name);
        continue;
      }
      // last row carries the final cumulative regret and bound
      std::ifstream in(path);
      std::string line, last;
      std::getline(in, line);  // header
      while (std::getline(in, line)) {
        if (!line.empty()) last = line;
      }
      std::vector<double> vals;
      std::stringstream ss(last);
      std::string tok;
      while (std::getline(ss, tok, ',')) vals.push_back(std::stod(tok));
      if (vals.size() >= 9) {
        cum_regret = vals[7];
        bound = vals[8];
      }
    }
    json row;
    row["seed"] = seed;
    row["cumulative_regret"] = cum_regret;
    row["eq5_bound"] = bound;
    row["compliant"] = cum_regret <= bound;
    rows.push_back(row);
    regrets.push_back(cum_regret);
    bounds.push_back(bound);
    ++counted;
    compliant += (cum_regret <= bound);
  }
  json out;
  out["per_seed"] = rows;
  if (!regrets.empty()) {
    out["cumulative_regret"] = stats_of(regrets);
    out["compliance"] =
        static_cast<double>(compliant) / static_cast<double>(counted);
  }
  return out;
}

}  // namespace

std::string run_experiment(const ExperimentConfig& cfg_in,
                           const RunOptions& opts) {
  ExperimentConfig cfg = cfg_in;
  if (const char* env = std::getenv("SCGAME_OUT")) {
    if (*env) cfg.out_dir = env;
  }

  json doc;
  if (cfg.mode == "solve-se") {
    doc = solve_se_document(cfg.distribution.build());
    if (!cfg.out_dir.empty()) {
      ensure_out_dir(cfg.out_dir, opts.force);
      write_text(cfg.out_dir + "/solve_se.json", doc.dump(2) + "\n");
      write_manifest(cfg, {"solve_se.json"});
    }
  } else if (cfg.mode == "simulate") {
    ensure_out_dir(cfg.out_dir, opts.force);
    std::vector<std::string> files;
    doc["mode"] = "simulate";
    doc["rows"] = simulate_rows(cfg, cfg.out_dir, &files, nullptr);
    write_text(cfg.out_dir + "/aggregate.json", doc.dump(2) + "\n");
    files.push_back("aggregate.json");
    write_manifest(cfg, files);
  } else if (cfg.mode == "adversarial") {
    ensure_out_dir(cfg.out_dir, opts.force);
    std::vector<std::string> files;
    doc["mode"] = "adversarial";
    doc["result"] = adversarial_rows(cfg, cfg.out_dir, &files, nullptr);
    write_text(cfg.out_dir + "/aggregate.json", doc.dump(2) + "\n");
    files.push_back("aggregate.json");
    write_manifest(cfg, files);
  } else {
    throw std::runtime_error("unknown mode " + cfg.mode);
  }

  const std::string text = doc.dump(2);
  if (!opts.quiet) std::cout << text << std::endl;
  return text;
}

std::string aggregate_run_dir(const std::string& dir) {
  const std::string manifest_path = dir + "/manifest.json";
  if (!fs::exists(manifest_path)) {
    throw std::runtime_error("no manifest found in " + dir);
  }
  std::ifstream in(manifest_path);
  json manifest = json::parse(in);
  ExperimentConfig cfg =
      parse_config_json(manifest.at("config").dump(), manifest_path);

  json doc;
  json missing = json::array();
  if (cfg.mode == "simulate") {
    doc["mode"] = "simulate";
    doc["rows"] = simulate_rows(cfg, dir, nullptr, &missing);
  } else if (cfg.mode == "adversarial") {
    doc["mode"] = "adversarial";
    doc["result"] = adversarial_rows(cfg, dir, nullptr, &missing);
  } else {
    doc["mode"] = cfg.mode;
  }
  doc["missing"] = missing;
  doc["content_hash"] = manifest.value("content_hash", "");
  return doc.dump(2);
}

}  // namespace supplychain
