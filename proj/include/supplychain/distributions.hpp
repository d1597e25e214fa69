#pragma once

#include <array>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "supplychain/rng.hpp"

namespace supplychain {

enum class DemandFamily { Uniform, Weibull, TruncExp, Custom };

struct Triple {
  double cost;
  double price;
  double demand;
};

// Joint law of (C, P, D). The parametric families have deterministic
// (Dirac) cost and price marginals and a parametric demand law, so the
// survival transform h(x) = E[P * Fbar(x | C,P)] and its inverse g are
// available in closed form. The Custom family falls back to a frozen
// Monte-Carlo sample pool.
class JointDistribution {
 public:
  using Sampler = std::function<Triple(SplitRng&)>;

  static JointDistribution uniform_demand(double c, double p);
  // Standard Weibull demand on [0, inf): Fbar(x) = exp(-(x/lambda)^k).
  // Unbounded support; usable for stage-game analysis only.
  static JointDistribution weibull_demand(double c, double p, double lambda,
                                          double k);
  // Exponential demand truncated to [0, 1]:
  // f(d) = rate * exp(-rate d) / (1 - exp(-rate)).
  static JointDistribution trunc_exp_demand(double c, double p, double rate);
  // User-supplied sampler. Expectations, h and g are estimated from a pool
  // of `pool_size` samples drawn once at construction. The density floor L
  // must be declared by the caller (it cannot be estimated robustly).
  static JointDistribution custom(Sampler sampler, double density_floor,
                                  std::size_t pool_size = 1u << 20,
                                  std::uint64_t pool_seed = 0x9d2c5680);

  DemandFamily family() const { return family_; }
  std::string family_name() const;

  Triple sample(SplitRng& rng) const;

  double expected_cost() const { return expected_cost_; }
  double expected_price() const { return expected_price_; }

  // h(x) = E[P * Fbar(x | C,P)], strictly decreasing on the demand support.
  double h(double x) const;
  // g(w) = h^{-1}(w) for w in (0, E[P]); throws std::domain_error outside.
  double g(double w) const;
  // dg/dw, analytic for parametric families, finite differences for Custom.
  double g_prime(double w) const;

  // E[min(q, D) * P], the retailer's expected revenue at order quantity q.
  double expected_min_revenue(double q) const;

  // Conditional demand CDF / density (marginal for the Dirac families).
  double demand_cdf(double d) const;
  double demand_density(double d) const;

  // Lower bound L on f(d | p) over the declared support; 0 when no such
  // bound exists (unbounded families).
  double density_floor() const { return density_floor_; }

  double support_upper() const { return support_upper_; }
  bool bounded_support() const {
    return support_upper_ <= 1.0 + 1e-12;
  }
  bool has_closed_forms() const { return family_ != DemandFamily::Custom; }

  std::size_t pool_size() const { return pool_.size(); }

  static constexpr double kGTolerance = 1e-10;

 private:
  JointDistribution() = default;
  void validate() const;

  double g_bisect(double w) const;

  DemandFamily family_ = DemandFamily::Uniform;
  double c_ = 0, p_ = 0;        // Dirac marginals of (C, P)
  double lambda_ = 1, k_ = 1;   // Weibull
  double rate_ = 1;             // truncated exponential
  double expected_cost_ = 0, expected_price_ = 0;
  double density_floor_ = 0;
  double support_upper_ = 1;
  Sampler sampler_;
  std::vector<Triple> pool_;    // Custom only
};

// Integrates fn over [a, b] by adaptive Simpson quadrature.
double integrate(const std::function<double(double)>& fn, double a, double b,
                 double tol = 1e-12);

}  // namespace supplychain
