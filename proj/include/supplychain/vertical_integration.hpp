#pragma once

#include <string>
#include <utility>
#include <vector>

#include "supplychain/rng.hpp"

namespace supplychain {

// Non-increasing [0,1]-valued demand curve, one per round.
struct DemandFn {
  enum class Kind { Threshold, Linear, Piecewise };

  // d(p) = 1{p <= v}
  static DemandFn threshold(double v);
  // d(p) = clamp(a - b p, 0, 1), b >= 0
  static DemandFn linear(double a, double b);
  // step function: value steps[i].second on [steps[i].first, steps[i+1].first)
  static DemandFn piecewise(std::vector<std::pair<double, double>> steps);

  double operator()(double p) const;

  Kind kind = Kind::Threshold;
  double v = 0;
  double a = 0, b = 0;
  std::vector<std::pair<double, double>> steps;
};

struct AdversarialInstance {
  std::vector<double> costs;
  std::vector<DemandFn> demands;

  int horizon() const { return static_cast<int>(costs.size()); }
};

// Social welfare under vertical integration: min(q, d) p - q c.
double welfare(double p, double q, double c, double d_value);
// [0,1]-valued loss: (1 - welfare) / 2.
double loss_from_welfare(double rho);

// Exp3 over the (K x (K+1)) price-quantity grid, exploiting the one-sided
// structure of censored sales: selling a smaller quantity on the chosen
// price row is always observable, so one draw updates a whole column range.
class Exp3Vi {
 public:
  Exp3Vi(double gamma, double eta);

  int K() const { return K_; }
  double gamma() const { return gamma_; }
  double eta() const { return eta_; }
  double price(int i) const { return (i - 1) * gamma_; }       // i in [K]
  double quantity(int j) const {                               // j in [K+1]
    return j == K_ + 1 ? 1.0 : (j - 1) * gamma_;
  }

  // Draws (I_t, J_t) from mu_t. Caches mu_t for the following update call.
  std::pair<int, int> act(SplitRng& rng);
  // Consumes only the censored feedback min(Q_t, d_t(P_t)) and the round's
  // cost; the true demand value is never needed.
  void update(int i_t, int j_t, double censored_feedback, double cost);

  // Normalized distributions and raw state, exposed for tests.
  std::vector<double> pi() const;
  std::vector<double> mu() const;
  const std::vector<double>& cumulative_losses() const { return cum_loss_; }

  std::size_t index(int i, int j) const {
    return static_cast<std::size_t>(i - 1) * (K_ + 1) + (j - 1);
  }

 private:
  void refresh_mu();

  double gamma_, eta_;
  int K_;
  std::vector<double> cum_loss_;  // cumulative estimated losses L-hat
  std::vector<double> mu_;        // mu_t cached by act()
  bool mu_fresh_ = false;
};

struct VIRoundRecord {
  int t = 0;
  int i = 0, j = 0;
  double price = 0, quantity = 0;
  double feedback = 0;  // min(Q_t, d_t(P_t))
  double welfare = 0;
};

struct VIResult {
  std::vector<VIRoundRecord> rounds;
  double best_fixed_welfare = 0;     // cumulative, over the continuum
  double realized_welfare = 0;       // cumulative
  double cumulative_regret = 0;
  double eq5_bound = 0;              // eta K T ln(eK/gamma) + 4 ln(K+1)/eta + 4 gamma T
  double simplified_bound = 0;       // 3 (4 + 3 ln T) T^{2/3}
};

VIResult run_adversarial(const AdversarialInstance& instance, double gamma,
                         double eta, SplitRng rng);

struct FixedAction {
  double p = 0;
  double q = 0;
  double value = 0;  // cumulative welfare
};

// Best fixed (p, q) in [0,1]^2 in hindsight. Exact for threshold-only
// instances; otherwise maximizes over the instances' breakpoint/vertex
// candidates plus a 1e-4 grid.
FixedAction best_fixed_action(const AdversarialInstance& instance);
double best_fixed_welfare(const AdversarialInstance& instance);

// Continuum best minus best over the (p'_i, q'_j) grid, cumulative; bounded
// by 2 gamma T.
double discretization_gap(const AdversarialInstance& instance, double gamma);

// Exponential-weights inequality on a raw loss sequence: returns
// min over arms of (RHS - LHS); nonnegative for any nonnegative losses.
// losses[t][i] is the loss of arm i at round t.
double verify_lemma2(const std::vector<std::vector<double>>& losses,
                     double eta);

// Instance file round records: cost<TAB>family<TAB>params, one per line.
AdversarialInstance read_instance_file(const std::string& path);
void write_instance_file(const AdversarialInstance& instance,
                         const std::string& path);

// Posted-price hard-instance family: costs 0, threshold demands with
// i.i.d. uniform valuations.
AdversarialInstance make_iid_uniform_posted_price(int horizon, SplitRng rng);

}  // namespace supplychain
