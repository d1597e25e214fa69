#include "supplychain/distributions.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace supplychain {

namespace {

double simpson(const std::function<double(double)>& fn, double a, double fa,
               double b, double fb, double m, double fm) {
  return (b - a) / 6.0 * (fa + 4.0 * fm + fb);
}

double adaptive(const std::function<double(double)>& fn, double a, double fa,
                double b, double fb, double m, double fm, double whole,
                double tol, int depth) {
  const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  const double flm = fn(lm), frm = fn(rm);
  const double left = simpson(fn, a, fa, m, fm, lm, flm);
  const double right = simpson(fn, m, fm, b, fb, rm, frm);
  if (depth <= 0 || std::abs(left + right - whole) <= 15.0 * tol) {
    return left + right + (left + right - whole) / 15.0;
  }
  return adaptive(fn, a, fa, m, fm, lm, flm, left, 0.5 * tol, depth - 1) +
         adaptive(fn, m, fm, b, fb, rm, frm, right, 0.5 * tol, depth - 1);
}

}  // namespace

double integrate(const std::function<double(double)>& fn, double a, double b,
                 double tol) {
  if (a == b) return 0.0;
  const double m = 0.5 * (a + b);
  const double fa = fn(a), fb = fn(b), fm = fn(m);
  return adaptive(fn, a, fa, b, fb, m, fm, simpson(fn, a, fa, b, fb, m, fm),
                  tol, 40);
}

JointDistribution JointDistribution::uniform_demand(double c, double p) {
  JointDistribution d;
  d.family_ = DemandFamily::Uniform;
  d.c_ = c;
  d.p_ = p;
  d.expected_cost_ = c;
  d.expected_price_ = p;
  d.density_floor_ = 1.0;
  d.support_upper_ = 1.0;
  d.validate();
  return d;
}

JointDistribution JointDistribution::weibull_demand(double c, double p,
                                                    double lambda, double k) {
  if (lambda <= 0 || k <= 0) {
    throw std::invalid_argument("weibull_demand: lambda and k must be > 0");
  }
  JointDistribution d;
  d.family_ = DemandFamily::Weibull;
  d.c_ = c;
  d.p_ = p;
  d.lambda_ = lambda;
  d.k_ = k;
  d.expected_cost_ = c;
  d.expected_price_ = p;
  d.density_floor_ = 0.0;  // no positive floor on [0, inf)
  d.support_upper_ = std::numeric_limits<double>::infinity();
  d.validate();
  return d;
}

JointDistribution JointDistribution::trunc_exp_demand(double c, double p,
                                                      double rate) {
  if (rate <= 0) {
    throw std::invalid_argument("trunc_exp_demand: rate must be > 0");
  }
  JointDistribution d;
  d.family_ = DemandFamily::TruncExp;
  d.c_ = c;
  d.p_ = p;
  d.rate_ = rate;
  d.expected_cost_ = c;
  d.expected_price_ = p;
  // density is decreasing on [0,1], so the floor is attained at d = 1
  d.density_floor_ = rate * std::exp(-rate) / (1.0 - std::exp(-rate));
  d.support_upper_ = 1.0;
  d.validate();
  return d;
}

JointDistribution JointDistribution::custom(Sampler sampler,
                                            double density_floor,
                                            std::size_t pool_size,
                                            std::uint64_t pool_seed) {
  if (!sampler) {
    throw std::invalid_argument("custom: sampler callback required");
  }
  if (density_floor <= 0) {
    throw std::invalid_argument("custom: density_floor must be declared > 0");
  }
  JointDistribution d;
  d.family_ = DemandFamily::Custom;
  d.sampler_ = std::move(sampler);
  d.density_floor_ = density_floor;
  d.support_upper_ = 1.0;
  d.pool_.reserve(pool_size);
  SplitRng rng(pool_seed);
  double c_sum = 0, p_sum = 0;
  for (std::size_t i = 0; i < pool_size; ++i) {
    SplitRng sub = rng.substream(i);
    Triple t = d.sampler_(sub);
    c_sum += t.cost;
    p_sum += t.price;
    d.pool_.push_back(t);
  }
  d.expected_cost_ = c_sum / static_cast<double>(pool_size);
  d.expected_price_ = p_sum / static_cast<double>(pool_size);
  d.validate();
  return d;
}

void JointDistribution::validate() const {
  if (!(expected_cost_ >= 0)) {
    throw std::invalid_argument("distribution: E[C] must be >= 0");
  }
  if (!(expected_cost_ < expected_price_)) {
    throw std::invalid_argument("distribution: requires E[C] < E[P]");
  }
  if (family_ != DemandFamily::Custom && (c_ < 0 || p_ <= 0)) {
    throw std::invalid_argument("distribution: c >= 0 and p > 0 required");
  }
}

std::string JointDistribution::family_name() const {
  switch (family_) {
    case DemandFamily::Uniform: return "uniform";
    case DemandFamily::Weibull: return "weibull";
    case DemandFamily::TruncExp: return "trunc_exp";
    case DemandFamily::Custom: return "custom";
  }
  return "?";
}

Triple JointDistribution::sample(SplitRng& rng) const {
  switch (family_) {
    case DemandFamily::Uniform:
      return {c_, p_, rng.uniform01()};
    case DemandFamily::Weibull: {
      const double u = rng.uniform01();
      return {c_, p_, lambda_ * std::pow(-std::log1p(-u), 1.0 / k_)};
    }
    case DemandFamily::TruncExp: {
      const double u = rng.uniform01() * (1.0 - std::exp(-rate_));
      return {c_, p_, -std::log1p(-u) / rate_};
    }
    case DemandFamily::Custom:
      return sampler_(rng);
  }
  throw std::logic_error("unreachable");
}

double JointDistribution::demand_cdf(double d) const {
  if (d <= 0) return 0.0;
  switch (family_) {
    case DemandFamily::Uniform:
      return std::min(d, 1.0);
    case DemandFamily::Weibull:
      return 1.0 - std::exp(-std::pow(d / lambda_, k_));
    case DemandFamily::TruncExp:
      if (d >= 1.0) return 1.0;
      return (1.0 - std::exp(-rate_ * d)) / (1.0 - std::exp(-rate_));
    case DemandFamily::Custom: {
      std::size_t n = 0;
      for (const Triple& t : pool_) n += (t.demand <= d);
      return static_cast<double>(n) / static_cast<double>(pool_.size());
    }
  }
  throw std::logic_error("unreachable");
}

double JointDistribution::demand_density(double d) const {
  switch (family_) {
    case DemandFamily::Uniform:
      return (d >= 0 && d <= 1) ? 1.0 : 0.0;
    case DemandFamily::Weibull:
      if (d <= 0) return 0.0;
      return k_ / lambda_ * std::pow(d / lambda_, k_ - 1.0) *
             std::exp(-std::pow(d / lambda_, k_));
    case DemandFamily::TruncExp:
      if (d < 0 || d > 1) return 0.0;
      return rate_ * std::exp(-rate_ * d) / (1.0 - std::exp(-rate_));
    case DemandFamily::Custom:
      throw std::logic_error("custom family has no density callback");
  }
  throw std::logic_error("unreachable");
}

double JointDistribution::h(double x) const {
  if (x < 0) throw std::domain_error("h: x must be >= 0");
  switch (family_) {
    case DemandFamily::Uniform:
      return x >= 1.0 ? 0.0 : p_ * (1.0 - x);
    case DemandFamily::Weibull:
      return p_ * std::exp(-std::pow(x / lambda_, k_));
    case DemandFamily::TruncExp: {
      if (x >= 1.0) return 0.0;
      const double e1 = std::exp(-rate_);
      return p_ * (std::exp(-rate_ * x) - e1) / (1.0 - e1);
    }
    case DemandFamily::Custom: {
      double acc = 0;
      for (const Triple& t : pool_) acc += t.price * (t.demand > x);
      return acc / static_cast<double>(pool_.size());
    }
  }
  throw std::logic_error("unreachable");
}

double JointDistribution::g(double w) const {
  if (!(w > 0.0 && w < expected_price_)) {
    throw std::domain_error("g: w must lie in (0, E[P])");
  }
  switch (family_) {
    case DemandFamily::Uniform:
      return (p_ - w) / p_;
    case DemandFamily::Weibull:
      return lambda_ * std::pow(std::log(p_ / w), 1.0 / k_);
    case DemandFamily::TruncExp: {
      const double e1 = std::exp(-rate_);
      const double u = (w / p_) * (1.0 - e1) + e1;
      return -std::log(u) / rate_;
    }
    case DemandFamily::Custom:
      return g_bisect(w);
  }
  throw std::logic_error("unreachable");
}

double JointDistribution::g_bisect(double w) const {
  // h is non-increasing; bracket [0, hi] with h(hi) <= w.
  double lo = 0.0, hi = support_upper_;
  if (!std::isfinite(hi)) {
    hi = 1.0;
    while (h(hi) > w) hi *= 2.0;
  }
  for (int it = 0; it < 200 && hi - lo > kGTolerance; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (h(mid) > w) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

double JointDistribution::g_prime(double w) const {
  switch (family_) {
    case DemandFamily::Uniform:
      return -1.0 / p_;
    case DemandFamily::Weibull:
      return -lambda_ / (k_ * w) * std::pow(std::log(p_ / w), 1.0 / k_ - 1.0);
    case DemandFamily::TruncExp: {
      // inverse function theorem: g'(w) = 1 / h'(g(w)) = -1 / (p f(g(w)))
      return -1.0 / (p_ * demand_density(g(w)));
    }
    case DemandFamily::Custom: {
      const double step = 1e-6;
      const double lo = std::max(w - step, 1e-12);
      const double hi = std::min(w + step, expected_price_ - 1e-12);
      return (g(hi) - g(lo)) / (hi - lo);
    }
  }
  throw std::logic_error("unreachable");
}

double JointDistribution::expected_min_revenue(double q) const {
  if (q <= 0) return 0.0;
  switch (family_) {
    case DemandFamily::Uniform: {
      const double qc = std::min(q, 1.0);
      return p_ * (qc - 0.5 * qc * qc);
    }
    case DemandFamily::Weibull: {
      // E[min(q,D)] = int_0^q Fbar(x) dx
      return p_ * integrate(
                      [this](double x) {
                        return std::exp(-std::pow(x / lambda_, k_));
                      },
                      0.0, q);
    }
    case DemandFamily::TruncExp: {
      const double qc = std::min(q, 1.0);
      const double e1 = std::exp(-rate_);
      return p_ * ((1.0 - std::exp(-rate_ * qc)) / rate_ - qc * e1) /
             (1.0 - e1);
    }
    case DemandFamily::Custom: {
      double acc = 0;
      for (const Triple& t : pool_) acc += std::min(q, t.demand) * t.price;
      return acc / static_cast<double>(pool_.size());
    }
  }
  throw std::logic_error("unreachable");
}

}  // namespace supplychain
