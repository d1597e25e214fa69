#pragma once

#include <vector>

#include "supplychain/distributions.hpp"

namespace supplychain {

struct StackelbergEquilibrium {
  double w_star = 0;
  double q_star = 0;
  double supplier_utility = 0;
  double retailer_utility = 0;
  std::vector<double> stationary_points;
  bool unique = false;
  // best objective value minus second best (infinity with one candidate)
  double uniqueness_margin = 0;
};

struct WeibullConcavityReport {
  bool concave = false;
  double max_second_derivative = 0;  // max of L'' over the scanned grid
};

struct WelfareReport {
  double optimal_welfare = 0;       // vertically integrated optimum
  double integrated_quantity = 0;   // its maximizer
  double equilibrium_welfare = 0;   // u_S + u_R at the SE
  double price_of_anarchy = 1;
};

inline constexpr double kTolStationary = 1e-9;
inline constexpr double kTolUnique = 1e-7;

// u_S(w, q) = q w - q E[C]
double supplier_utility(const JointDistribution& dist, double w, double q);
// u_R(w, q) = E[min(q, D) P] - q w
double retailer_utility(const JointDistribution& dist, double w, double q);

// g(w) below E[P], zero at or above it.
double best_response(const JointDistribution& dist, double w);

// Supplier's reduced objective f(w) = g(w) (w - E[C]) and its derivative
// phi(w) = g'(w) (w - E[C]) + g(w), the stationarity residual.
double supplier_objective(const JointDistribution& dist, double w);
double supplier_objective_derivative(const JointDistribution& dist, double w);

// Scans (E[C], E[P]) for stationary points of the supplier's reduced
// objective, refines each by bisection and returns the argmax.
StackelbergEquilibrium solve_equilibrium(const JointDistribution& dist);

// Checks concavity of L(w) = g(w)(w - c) on (c, p) for a deterministic
// (c, p) with Weibull demand, via central differences of L'.
WeibullConcavityReport verify_weibull_uniqueness(double c, double p,
                                                 double lambda, double k);

// Welfare under vertical integration versus at the SE.
WelfareReport price_of_anarchy(const JointDistribution& dist,
                               const StackelbergEquilibrium& se);

}  // namespace supplychain
