#pragma once

#include <string>
#include <vector>

#include "supplychain/distributions.hpp"
#include "supplychain/learners.hpp"
#include "supplychain/stage_game.hpp"

namespace supplychain {

struct RoundRecord {
  int t = 0;
  double w = 0, q = 0, c = 0, p = 0, d = 0;
  double sigma = 0;  // q w - q c
  double rho = 0;    // min(q, d) p - q w
};

using Trajectory = std::vector<RoundRecord>;

enum class TheoremBound { Thm2Supplier, Thm2LastIterate, Thm4, Thm5 };

struct BoundParams {
  double expected_cost = 0;
  double expected_price = 0;
  double density_floor = 0;
  double lipschitz = 0;  // M, used by Thm4
};

struct RegretReport {
  int horizon = 0;
  double supplier_avg_regret = 0;
  double retailer_avg_regret = 0;
  double l1_last_iterate = 0;
  std::vector<double> bound_curve;  // bound value at each t = 1..T
  TheoremBound bound_id = TheoremBound::Thm2Supplier;
};

// Runs the six-step round protocol for T rounds. The supplier acts before
// seeing q_t and observes (q_t, c_t) afterwards; the retailer sees w_t
// before acting and (p_t, d_t) after selling. Nature's draws come from
// per-round substreams of `rng`, so trajectories are reproducible
// bit-for-bit per seed.
Trajectory run_episode(const JointDistribution& dist,
                       SupplierPolicy& supplier, RetailerPolicy& retailer,
                       int horizon, SplitRng rng);

// Average SE benchmark utility minus average realized utility.
double supplier_regret(const Trajectory& traj,
                       const StackelbergEquilibrium& se,
                       const JointDistribution& dist);
// Retailer regret against E[rho(q*; w*, P, D)], with the per-round term
// evaluated as the conditional expected utility at the realized (w_t, q_t).
double retailer_regret(const Trajectory& traj,
                       const StackelbergEquilibrium& se,
                       const JointDistribution& dist);

double l1_last_iterate(const Trajectory& traj,
                       const StackelbergEquilibrium& se);

// Closed-form bound value at horizon t.
double bound_value(TheoremBound id, const BoundParams& params, int t);
// Per-t curve for t = 1..T.
std::vector<double> bound_curve(TheoremBound id, const BoundParams& params,
                                int horizon);
// Simple-regret bound 9 M log2(M t) / t (per-round, not averaged).
double simple_regret_bound(double lipschitz, int t);

RegretReport make_regret_report(const Trajectory& traj,
                                const StackelbergEquilibrium& se,
                                const JointDistribution& dist,
                                TheoremBound id, const BoundParams& params);

// Trajectory CSV with columns t,w,q,c,p,d,sigma,rho (17 significant
// digits).
void write_trajectory_csv(const Trajectory& traj, const std::string& path);
Trajectory read_trajectory_csv(const std::string& path);

}  // namespace supplychain
