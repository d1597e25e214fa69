#include "supplychain/repeated_game.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace supplychain {

Trajectory run_episode(const JointDistribution& dist,
                       SupplierPolicy& supplier, RetailerPolicy& retailer,
                       int horizon, SplitRng rng) {
  if (!dist.bounded_support()) {
    throw std::invalid_argument(
        "run_episode: the learning protocol requires support in [0,1]^3");
  }
  Trajectory traj;
  traj.reserve(horizon);
  for (int t = 1; t <= horizon; ++t) {
    SplitRng round_rng = rng.substream(static_cast<std::uint64_t>(t));
    const Triple nature = dist.sample(round_rng);

    const double w = supplier.act(t);
    if (!(w >= 0.0 && w <= 1.0)) {
      throw std::runtime_error("protocol violation: wholesale price not in [0,1]");
    }
    const double q = retailer.act(t, w);
    if (!(q >= 0.0 && q <= 1.0)) {
      throw std::runtime_error("protocol violation: quantity not in [0,1]");
    }
    supplier.observe(t, q, nature.cost);
    retailer.observe(t, nature.price, nature.demand);

    RoundRecord rec;
    rec.t = t;
    rec.w = w;
    rec.q = q;
    rec.c = nature.cost;
    rec.p = nature.price;
    rec.d = nature.demand;
    rec.sigma = q * w - q * nature.cost;
    rec.rho = std::min(q, nature.demand) * nature.price - q * w;
    traj.push_back(rec);
  }
  return traj;
}

double supplier_regret(const Trajectory& traj,
                       const StackelbergEquilibrium& se,
                       const JointDistribution& dist) {
  const double benchmark = se.q_star * (se.w_star - dist.expected_cost());
  double realized = 0;
  for (const RoundRecord& r : traj) realized += r.sigma;
  return benchmark - realized / static_cast<double>(traj.size());
}

double retailer_regret(const Trajectory& traj,
                       const StackelbergEquilibrium& se,
                       const JointDistribution& dist) {
  const double benchmark = retailer_utility(dist, se.w_star, se.q_star);
  double realized = 0;
  for (const RoundRecord& r : traj) {
    realized += retailer_utility(dist, r.w, r.q);
  }
  return benchmark - realized / static_cast<double>(traj.size());
}

double l1_last_iterate(const Trajectory& traj,
                       const StackelbergEquilibrium& se) {
  const RoundRecord& last = traj.back();
  return std::abs(se.w_star - last.w) + std::abs(se.q_star - last.q);
}

double bound_value(TheoremBound id, const BoundParams& p, int t) {
  const double td = static_cast<double>(t);
  switch (id) {
    case TheoremBound::Thm2Supplier:
      return ((1.0 - p.expected_cost) / (p.expected_price * p.density_floor) +
              2.0) /
             std::sqrt(td);
    case TheoremBound::Thm2LastIterate:
      return (1.0 / (p.expected_price * p.density_floor) + 1.0) /
             std::sqrt(td);
    case TheoremBound::Thm4:
      return 2.0 * p.lipschitz * std::log(4.0 * td) / td;
    case TheoremBound::Thm5:
      return (16.0 +
              (1.0 - p.expected_cost) / (p.expected_price * p.density_floor) +
              7.0 * std::sqrt(std::log(td))) *
             std::pow(td, -1.0 / 3.0);
  }
  throw std::invalid_argument("bound_value: unknown theorem id");
}

std::vector<double> bound_curve(TheoremBound id, const BoundParams& params,
                                int horizon) {
  std::vector<double> curve;
  curve.reserve(horizon);
  for (int t = 1; t <= horizon; ++t) curve.push_back(bound_value(id, params, t));
  return curve;
}

double simple_regret_bound(double lipschitz, int t) {
  return 9.0 * lipschitz * std::log2(lipschitz * t) / static_cast<double>(t);
}

RegretReport make_regret_report(const Trajectory& traj,
                                const StackelbergEquilibrium& se,
                                const JointDistribution& dist,
                                TheoremBound id, const BoundParams& params) {
  RegretReport rep;
  rep.horizon = static_cast<int>(traj.size());
  rep.supplier_avg_regret = supplier_regret(traj, se, dist);
  rep.retailer_avg_regret = retailer_regret(traj, se, dist);
  rep.l1_last_iterate = l1_last_iterate(traj, se);
  rep.bound_id = id;
  rep.bound_curve = bound_curve(id, params, rep.horizon);
  return rep;
}

void write_trajectory_csv(const Trajectory& traj, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path);
  out << "t,w,q,c,p,d,sigma,rho\n";
  char buf[256];
  for (const RoundRecord& r : traj) {
    std::snprintf(buf, sizeof(buf),
                  "%d,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n", r.t, r.w,
                  r.q, r.c, r.p, r.d, r.sigma, r.rho);
    out << buf;
  }
}

Trajectory read_trajectory_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::string line;
  std::getline(in, line);  // header
  Trajectory traj;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    RoundRecord r;
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream ss(line);
    ss >> r.t >> r.w >> r.q >> r.c >> r.p >> r.d >> r.sigma >> r.rho;
    traj.push_back(r);
  }
  return traj;
}

}  // namespace supplychain
