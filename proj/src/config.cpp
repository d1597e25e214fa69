#include "supplychain/config.hpp"

#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace supplychain {

using nlohmann::json;

JointDistribution DistributionSpec::build() const {
  if (family == "uniform") return JointDistribution::uniform_demand(c, p);
  if (family == "weibull") {
    return JointDistribution::weibull_demand(c, p, lambda, k);
  }
  if (family == "trunc_exp") {
    return JointDistribution::trunc_exp_demand(c, p, rate);
  }
  throw std::runtime_error("distribution.family: unknown family '" + family +
                           "'");
}

namespace {

[[noreturn]] void fail(const std::string& origin, const std::string& field,
                       const std::string& what) {
  throw std::runtime_error(origin + ": " + field + ": " + what);
}

DistributionSpec parse_distribution(const json& j, const std::string& origin) {
  DistributionSpec spec;
  if (!j.contains("family")) fail(origin, "distribution.family", "missing");
  spec.family = j.at("family").get<std::string>();
  spec.c = j.value("c", 0.0);
  spec.p = j.value("p", 0.0);
  spec.lambda = j.value("lambda", 1.0);
  spec.k = j.value("k", 1.0);
  spec.rate = j.value("rate", 1.0);
  try {
    spec.build();
  } catch (const std::exception& e) {
    fail(origin, "distribution", e.what());
  }
  return spec;
}

}  // namespace

ExperimentConfig parse_config_json(const std::string& text,
                                   const std::string& origin) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw std::runtime_error(origin + ": " + e.what());
  }

  ExperimentConfig cfg;
  if (!j.contains("mode")) fail(origin, "mode", "missing");
  cfg.mode = j.at("mode").get<std::string>();
  if (cfg.mode != "solve-se" && cfg.mode != "simulate" &&
      cfg.mode != "adversarial") {
    fail(origin, "mode", "expected solve-se, simulate or adversarial");
  }

  cfg.out_dir = j.value("out", "");

  if (cfg.mode == "solve-se" || cfg.mode == "simulate") {
    if (!j.contains("distribution")) fail(origin, "distribution", "missing");
    cfg.distribution = parse_distribution(j.at("distribution"), origin);
  }

  if (cfg.mode == "simulate") {
    cfg.supplier = j.value("supplier", json::object()).value("name", "");
    cfg.retailer = j.value("retailer", json::object()).value("name", "");
    if (cfg.supplier != "etc" && cfg.supplier != "piyavskii" &&
        cfg.supplier != "etc_nocost") {
      fail(origin, "supplier.name", "expected etc, piyavskii or etc_nocost");
    }
    if (cfg.retailer != "exact_br" && cfg.retailer != "ftl") {
      fail(origin, "retailer.name", "expected exact_br or ftl");
    }
    if (!j.contains("horizons")) fail(origin, "horizons", "missing");
    cfg.horizons = j.at("horizons").get<std::vector<int>>();
    if (cfg.horizons.empty()) fail(origin, "horizons", "must be non-empty");
    const int min_horizon =
        (cfg.retailer == "ftl" || cfg.supplier == "etc_nocost") ? 12 : 1;
    for (int T : cfg.horizons) {
      if (T < min_horizon) {
        fail(origin, "horizons",
             "horizon " + std::to_string(T) + " below the minimum " +
                 std::to_string(min_horizon) +
                 (min_horizon == 12 ? " required by the chosen policies (T >= 12)"
                                    : ""));
      }
    }

    if (j.contains("seeds")) {
      const json& s = j.at("seeds");
      if (s.contains("list")) {
        cfg.seeds = s.at("list").get<std::vector<std::uint64_t>>();
      } else {
        const std::uint64_t base = s.value("base", 1);
        const int count = s.value("count", 0);
        for (int i = 0; i < count; ++i) cfg.seeds.push_back(base + i);
      }
    }
    if (cfg.seeds.empty()) fail(origin, "seeds", "at least one seed required");
    if (std::set<std::uint64_t>(cfg.seeds.begin(), cfg.seeds.end()).size() !=
        cfg.seeds.size()) {
      fail(origin, "seeds", "seeds must be distinct");
    }

    cfg.bounds = j.value("bounds", std::vector<std::string>{});
    for (const std::string& b : cfg.bounds) {
      if (b == "thm2") {
        if (cfg.supplier != "etc" || cfg.retailer != "exact_br") {
          fail(origin, "bounds", "thm2 applies to etc + exact_br");
        }
      } else if (b == "thm4") {
        if (cfg.supplier != "piyavskii") {
          fail(origin, "bounds", "thm4 applies to the piyavskii supplier");
        }
      } else if (b == "thm5") {
        if (cfg.supplier != "etc_nocost" || cfg.retailer != "ftl") {
          fail(origin, "bounds", "thm5 applies to etc_nocost + ftl");
        }
      } else {
        fail(origin, "bounds", "unknown bound id '" + b + "'");
      }
    }
  }

  if (cfg.mode == "adversarial") {
    if (!j.contains("instance")) fail(origin, "instance", "missing");
    const json& inst = j.at("instance");
    cfg.instance_kind = inst.value("kind", "");
    if (cfg.instance_kind == "file") {
      cfg.instance_file = inst.value("path", "");
      if (cfg.instance_file.empty()) fail(origin, "instance.path", "missing");
    } else if (cfg.instance_kind == "iid_uniform_posted_price") {
      cfg.instance_horizon = inst.value("horizon", 0);
      if (cfg.instance_horizon < 1) {
        fail(origin, "instance.horizon", "must be >= 1");
      }
    } else {
      fail(origin, "instance.kind",
           "expected file or iid_uniform_posted_price");
    }
    cfg.gamma = j.value("gamma", 0.0);
    cfg.eta = j.value("eta", 0.0);
    if (cfg.gamma < 0 || cfg.eta < 0) {
      fail(origin, "gamma/eta", "must be positive (or omitted for defaults)");
    }
    if (j.contains("seeds")) {
      const json& s = j.at("seeds");
      if (s.contains("list")) {
        cfg.seeds = s.at("list").get<std::vector<std::uint64_t>>();
      } else {
        const std::uint64_t base = s.value("base", 1);
        const int count = s.value("count", 0);
        for (int i = 0; i < count; ++i) cfg.seeds.push_back(base + i);
      }
    }
    if (cfg.seeds.empty()) fail(origin, "seeds", "at least one seed required");
  }

  return cfg;
}

ExperimentConfig parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config_json(ss.str(), path);
}

std::string ExperimentConfig::canonical_json() const {
  json j;  // nlohmann objects keep keys sorted, so dumps are canonical
  j["mode"] = mode;
  if (mode == "solve-se" || mode == "simulate") {
    json d;
    d["family"] = distribution.family;
    d["c"] = distribution.c;
    d["p"] = distribution.p;
    if (distribution.family == "weibull") {
      d["lambda"] = distribution.lambda;
      d["k"] = distribution.k;
    }
    if (distribution.family == "trunc_exp") d["rate"] = distribution.rate;
    j["distribution"] = d;
  }
  if (mode == "simulate") {
    j["supplier"] = {{"name", supplier}};
    j["retailer"] = {{"name", retailer}};
    j["horizons"] = horizons;
    j["seeds"] = {{"list", seeds}};
    j["bounds"] = bounds;
  }
  if (mode == "adversarial") {
    json inst;
    inst["kind"] = instance_kind;
    if (instance_kind == "file") inst["path"] = instance_file;
    if (instance_horizon > 0) inst["horizon"] = instance_horizon;
    j["instance"] = inst;
    j["gamma"] = gamma;
    j["eta"] = eta;
    j["seeds"] = {{"list", seeds}};
  }
  // same schema as the input config, so a manifest echo re-parses cleanly
  return j.dump();
}

std::string ExperimentConfig::content_hash() const {
  // FNV-1a 64
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : canonical_json()) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(h));
  return std::string(buf);
}

}  // namespace supplychain
