#include "supplychain/stage_game.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace supplychain {

double supplier_utility(const JointDistribution& dist, double w, double q) {
  return q * w - q * dist.expected_cost();
}

double retailer_utility(const JointDistribution& dist, double w, double q) {
  return dist.expected_min_revenue(q) - q * w;
}

double best_response(const JointDistribution& dist, double w) {
  if (w >= dist.expected_price()) return 0.0;
  // w = 0 is served via the right limit of g
  return dist.g(std::max(w, 1e-12));
}

double supplier_objective(const JointDistribution& dist, double w) {
  return dist.g(w) * (w - dist.expected_cost());
}

double supplier_objective_derivative(const JointDistribution& dist, double w) {
  return dist.g_prime(w) * (w - dist.expected_cost()) + dist.g(w);
}

namespace {

// Golden-section maximization on [lo, hi] for a unimodal bracket.
double golden_max(const std::function<double(double)>& fn, double lo,
                  double hi, double tol) {
  const double invphi = 0.5 * (std::sqrt(5.0) - 1.0);
  double a = lo, b = hi;
  double x1 = b - invphi * (b - a), x2 = a + invphi * (b - a);
  double f1 = fn(x1), f2 = fn(x2);
  while (b - a > tol) {
    if (f1 < f2) {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + invphi * (b - a);
      f2 = fn(x2);
    } else {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - invphi * (b - a);
      f1 = fn(x1);
    }
  }
  return 0.5 * (a + b);
}

}  // namespace

StackelbergEquilibrium solve_equilibrium(const JointDistribution& dist) {
  const double ec = dist.expected_cost();
  const double ep = dist.expected_price();
  const double eps = 1e-9;
  const double lo = ec + eps, hi = ep - eps;
  const int grid = 10000;

  auto phi = [&](double w) {
    return supplier_objective_derivative(dist, w);
  };

  // locate sign changes of the stationarity residual on a dense grid
  std::vector<double> roots;
  double w_prev = lo, phi_prev = phi(lo);
  for (int i = 1; i <= grid; ++i) {
    const double w = lo + (hi - lo) * static_cast<double>(i) / grid;
    const double phi_w = phi(w);
    if (phi_prev == 0.0) {
      roots.push_back(w_prev);
    } else if (phi_prev * phi_w < 0.0) {
      double a = w_prev, b = w;
      for (int it = 0; it < 100; ++it) {
        const double m = 0.5 * (a + b);
        if (phi(a) * phi(m) <= 0.0) {
          b = m;
        } else {
          a = m;
        }
      }
      roots.push_back(0.5 * (a + b));
    }
    w_prev = w;
    phi_prev = phi_w;
  }
  std::sort(roots.begin(), roots.end());
  roots.erase(std::unique(roots.begin(), roots.end(),
                          [](double a, double b) { return b - a < 1e-7; }),
              roots.end());

  if (roots.empty()) {
    throw std::runtime_error(
        "solve_equilibrium: no interior maximizer located");
  }

  StackelbergEquilibrium se;
  se.stationary_points = roots;
  double best = -std::numeric_limits<double>::infinity();
  double second = -std::numeric_limits<double>::infinity();
  for (double w : roots) {
    const double val = supplier_objective(dist, w);
    if (val > best) {
      second = best;
      best = val;
      se.w_star = w;
    } else if (val > second) {
      second = val;
    }
  }
  se.uniqueness_margin = roots.size() == 1
                             ? std::numeric_limits<double>::infinity()
                             : best - second;
  se.unique = roots.size() == 1 || se.uniqueness_margin > kTolUnique;
  se.q_star = dist.g(se.w_star);
  se.supplier_utility = se.q_star * (se.w_star - ec);
  se.retailer_utility = retailer_utility(dist, se.w_star, se.q_star);
  return se;
}

WeibullConcavityReport verify_weibull_uniqueness(double c, double p,
                                                 double lambda, double k) {
  if (!(0 < c && c < p)) {
    throw std::invalid_argument("verify_weibull_uniqueness: need 0 < c < p");
  }
  if (k < 1.0) {
    throw std::invalid_argument("verify_weibull_uniqueness: need k >= 1");
  }
  const JointDistribution dist =
      JointDistribution::weibull_demand(c, p, lambda, k);

  // L''(w) by central difference of the analytic L'(w) = g'(w)(w-c) + g(w);
  // differencing L itself leaves ~1e-4 of roundoff, far above the check's
  // tolerance.
  auto l_prime = [&](double w) {
    return dist.g_prime(w) * (w - c) + dist.g(w);
  };
  const double margin = 1e-3 * (p - c);
  const double step = 1e-6 * (p - c);
  const int grid = 2000;
  WeibullConcavityReport rep;
  rep.max_second_derivative = -std::numeric_limits<double>::infinity();
  for (int i = 0; i <= grid; ++i) {
    const double w = (c + margin) + (p - c - 2 * margin) * i / grid;
    const double l2 = (l_prime(w + step) - l_prime(w - step)) / (2.0 * step);
    rep.max_second_derivative = std::max(rep.max_second_derivative, l2);
  }
  rep.concave = rep.max_second_derivative <= kTolStationary;
  return rep;
}

WelfareReport price_of_anarchy(const JointDistribution& dist,
                               const StackelbergEquilibrium& se) {
  const double ec = dist.expected_cost();
  auto welfare = [&](double q) {
    return dist.expected_min_revenue(q) - ec * q;
  };

  // integrated optimum: W'(q) = h(q) - E[C], so q~ = g(E[C]) when defined
  double q_cap;
  if (dist.bounded_support()) {
    q_cap = dist.support_upper();
  } else if (ec > 0.0) {
    q_cap = 2.0 * dist.g(ec);
  } else {
    q_cap = 1.0;
    while (dist.h(q_cap) > 1e-9) q_cap *= 2.0;
  }

  const int grid = 10000;
  int best_i = 0;
  double best_val = welfare(0.0);
  for (int i = 1; i <= grid; ++i) {
    const double v = welfare(q_cap * i / grid);
    if (v > best_val) {
      best_val = v;
      best_i = i;
    }
  }
  const double a = q_cap * std::max(best_i - 1, 0) / grid;
  const double b = q_cap * std::min(best_i + 1, grid) / grid;
  double q_tilde = golden_max(welfare, a, b, 1e-12);
  double w_tilde = welfare(q_tilde);
  if (ec > 0.0 && ec < dist.expected_price()) {
    const double q_fo = dist.g(ec);  // first-order candidate
    if (q_fo <= q_cap && welfare(q_fo) >= w_tilde) {
      q_tilde = q_fo;
      w_tilde = welfare(q_fo);
    }
  }

  WelfareReport rep;
  rep.integrated_quantity = q_tilde;
  rep.optimal_welfare = w_tilde;
  rep.equilibrium_welfare = se.supplier_utility + se.retailer_utility;
  rep.price_of_anarchy = rep.equilibrium_welfare > 0
                             ? rep.optimal_welfare / rep.equilibrium_welfare
                             : std::numeric_limits<double>::infinity();
  return rep;
}

}  // namespace supplychain
