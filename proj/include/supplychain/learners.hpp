#pragma once

#include <cstdint>
#include <memory>
#include <vector>

#include "supplychain/distributions.hpp"
#include "supplychain/rng.hpp"
#include "supplychain/stage_game.hpp"

namespace supplychain {

// Supplier side of the repeated protocol: act before seeing the round's
// quantity, observe (q_t, c_t) afterwards.
class SupplierPolicy {
 public:
  virtual ~SupplierPolicy() = default;
  virtual double act(int t) = 0;
  virtual void observe(int t, double quantity, double cost) = 0;
};

// Retailer side: sees w_t before acting, (p_t, d_t) after selling.
class RetailerPolicy {
 public:
  virtual ~RetailerPolicy() = default;
  virtual double act(int t, double wholesale) = 0;
  virtual void observe(int t, double price, double demand) = 0;
};

// Explore-Then-Commit with known E[C]: sweep the grid
// {s / (floor(sqrt T) + 1)} once, then commit to the empirical argmax of
// q_s (w_s - E[C]).
class EtcSupplier : public SupplierPolicy {
 public:
  EtcSupplier(int horizon, double expected_cost);
  double act(int t) override;
  void observe(int t, double quantity, double cost) override;

  int grid_size() const { return grid_size_; }
  double committed_w() const { return committed_w_; }

 private:
  int horizon_;
  int grid_size_;
  double expected_cost_;
  std::vector<double> wholesale_;  // explored w_s
  std::vector<double> quantity_;   // observed q_s
  bool committed_ = false;
  double committed_w_ = 0;
};

// Piyavskii-Shubert zeroth-order maximization of f(w) = q_w (w - E[C])
// with a known Lipschitz bound M. The next query maximizes the
// piecewise-linear upper envelope min_s { f_s + M |w_s - w| }, computed
// exactly from its breakpoints.
class PiyavskiiSupplier : public SupplierPolicy {
 public:
  PiyavskiiSupplier(int horizon, double lipschitz, double expected_cost);
  double act(int t) override;
  void observe(int t, double quantity, double cost) override;

  // Envelope value at w; an upper bound on f whenever M dominates the true
  // Lipschitz constant.
  double proxy(double w) const;

 private:
  double envelope_argmax() const;

  int horizon_;
  double lipschitz_;
  double expected_cost_;
  std::vector<std::pair<double, double>> evals_;  // (w_s, f_s), sorted by w
  double next_w_ = 1.0;
};

// Explore-Then-Commit without knowledge of E[C] (horizon T >= 12):
// n = ceil(T^{1/3}) grid points swept in n+1 passes; the cost estimate is
// the mean of the first n^2 observed costs and the commit argmax ranges
// over the final pass only.
class EtcNoCostSupplier : public SupplierPolicy {
 public:
  explicit EtcNoCostSupplier(int horizon);
  double act(int t) override;
  void observe(int t, double quantity, double cost) override;

  int grid_size() const { return grid_size_; }
  int exploration_rounds() const { return exploration_rounds_; }
  double estimated_cost() const { return estimated_cost_; }
  // set when the commit argmax range was empty and the policy fell back to
  // the overall empirical argmax (only possible at tiny horizons)
  bool fallback_used() const { return fallback_used_; }

 private:
  int horizon_;
  int grid_size_;          // ceil(T^{1/3})
  int exploration_rounds_; // (grid_size + 1) * grid_size
  std::vector<double> wholesale_;
  std::vector<double> quantity_;
  std::vector<double> costs_;
  bool committed_ = false;
  bool fallback_used_ = false;
  double committed_w_ = 0;
  double estimated_cost_ = 0;
};

// Best response computed from the known marginal of (P, D).
class ExactBestResponseRetailer : public RetailerPolicy {
 public:
  explicit ExactBestResponseRetailer(const JointDistribution& dist);
  double act(int t, double wholesale) override;
  void observe(int /*t*/, double /*price*/, double /*demand*/) override {}

 private:
  const JointDistribution* dist_;
};

// Follow-the-Leader over the grid {k / (ceil(T^{1/3}) + 1)}: best response
// against the empirical distribution of past (D_s, P_s), with the round-1
// quantity drawn uniformly from the grid.
class FtlRetailer : public RetailerPolicy {
 public:
  FtlRetailer(int horizon, SplitRng rng);
  double act(int t, double wholesale) override;
  void observe(int t, double price, double demand) override;

  const std::vector<double>& grid() const { return grid_; }

 private:
  int horizon_;
  std::vector<double> grid_;
  std::vector<double> revenue_sum_;  // sum_s min(q_k, D_s) P_s per grid point
  int history_len_ = 0;
  SplitRng rng_;
};

// ceil(T^{1/3}) computed exactly on integers.
int cube_root_ceil(int t);

// M = (1 - E[C]) / (E[P] L) + 1, the Lipschitz bound fed to Piyavskii.
double lipschitz_bound(double expected_cost, double expected_price,
                       double density_floor);

}  // namespace supplychain
