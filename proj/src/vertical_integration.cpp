#include "supplychain/vertical_integration.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>
#include <stdexcept>

namespace supplychain {

DemandFn DemandFn::threshold(double v) {
  if (v < 0 || v > 1) throw std::invalid_argument("threshold: v in [0,1]");
  DemandFn d;
  d.kind = Kind::Threshold;
  d.v = v;
  return d;
}

DemandFn DemandFn::linear(double a, double b) {
  if (b < 0) throw std::invalid_argument("linear: slope b must be >= 0");
  DemandFn d;
  d.kind = Kind::Linear;
  d.a = a;
  d.b = b;
  return d;
}

DemandFn DemandFn::piecewise(std::vector<std::pair<double, double>> steps) {
  if (steps.empty() || steps.front().first != 0.0) {
    throw std::invalid_argument("piecewise: steps must start at p = 0");
  }
  double prev_x = -1, prev_y = 2;
  for (const auto& [x, y] : steps) {
    if (x < 0 || x > 1 || y < 0 || y > 1 || x <= prev_x || y > prev_y) {
      throw std::invalid_argument(
          "piecewise: breakpoints must be increasing in [0,1] with "
          "non-increasing values");
    }
    prev_x = x;
    prev_y = y;
  }
  DemandFn d;
  d.kind = Kind::Piecewise;
  d.steps = std::move(steps);
  return d;
}

double DemandFn::operator()(double p) const {
  switch (kind) {
    case Kind::Threshold:
      return p <= v ? 1.0 : 0.0;
    case Kind::Linear:
      return std::clamp(a - b * p, 0.0, 1.0);
    case Kind::Piecewise: {
      double val = steps.front().second;
      for (const auto& [x, y] : steps) {
        if (p >= x) val = y;
        else break;
      }
      return val;
    }
  }
  throw std::logic_error("unreachable");
}

double welfare(double p, double q, double c, double d_value) {
  return std::min(q, d_value) * p - q * c;
}

double loss_from_welfare(double rho) { return 0.5 * (1.0 - rho); }

// ---------------------------------------------------------------------------
// Exp3Vi

Exp3Vi::Exp3Vi(double gamma, double eta) : gamma_(gamma), eta_(eta) {
  if (gamma <= 0 || eta <= 0) {
    throw std::invalid_argument("Exp3Vi: gamma and eta must be > 0");
  }
  K_ = static_cast<int>(std::ceil(1.0 / gamma));
  cum_loss_.assign(static_cast<std::size_t>(K_) * (K_ + 1), 0.0);
  mu_.assign(cum_loss_.size(), 0.0);
}

std::vector<double> Exp3Vi::pi() const {
  // weights held as cumulative losses; normalize through a log-sum-exp
  // shift so eta * L-hat sums cannot overflow
  const double shift =
      *std::min_element(cum_loss_.begin(), cum_loss_.end());
  std::vector<double> out(cum_loss_.size());
  double total = 0;
  for (std::size_t n = 0; n < cum_loss_.size(); ++n) {
    out[n] = std::exp(-eta_ * (cum_loss_[n] - shift));
    total += out[n];
  }
  for (double& x : out) x /= total;
  return out;
}

void Exp3Vi::refresh_mu() {
  mu_ = pi();
  for (int i = 1; i <= K_; ++i) {
    for (int j = 1; j <= K_ + 1; ++j) {
      mu_[index(i, j)] *= (1.0 - gamma_);
      if (j == K_ + 1) mu_[index(i, j)] += gamma_ / K_;
    }
  }
  mu_fresh_ = true;
}

std::vector<double> Exp3Vi::mu() const {
  Exp3Vi copy = *this;
  copy.refresh_mu();
  return copy.mu_;
}

std::pair<int, int> Exp3Vi::act(SplitRng& rng) {
  refresh_mu();
  // inverse CDF over the fixed (i, j) lexicographic order
  const double u = rng.uniform01();
  double acc = 0;
  for (int i = 1; i <= K_; ++i) {
    for (int j = 1; j <= K_ + 1; ++j) {
      acc += mu_[index(i, j)];
      if (u < acc) return {i, j};
    }
  }
  return {K_, K_ + 1};
}

void Exp3Vi::update(int i_t, int j_t, double censored_feedback, double cost) {
  if (!mu_fresh_) refresh_mu();
  const double q_t = quantity(j_t);
  if (censored_feedback < -1e-12 || censored_feedback > q_t + 1e-12) {
    throw std::runtime_error(
        "protocol violation: feedback outside [0, Q_t]");
  }
  const double p_t = price(i_t);

  // suffix sums of mu over the chosen price row
  std::vector<double> suffix(K_ + 3, 0.0);
  for (int j = K_ + 1; j >= 1; --j) {
    suffix[j] = suffix[j + 1] + mu_[index(i_t, j)];
  }

  // for every j <= J_t, min(q'_j, d_t(P_t)) = min(q'_j, feedback) since
  // q'_j <= Q_t, so the loss is reconstructible from censored feedback
  for (int j = 1; j <= j_t; ++j) {
    const double qj = quantity(j);
    const double rho = std::min(qj, censored_feedback) * p_t - qj * cost;
    const double est = loss_from_welfare(rho) / suffix[j];
    cum_loss_[index(i_t, j)] += est;
  }
  mu_fresh_ = false;
}

// ---------------------------------------------------------------------------
// best fixed action

namespace {

bool all_threshold(const AdversarialInstance& inst) {
  for (const DemandFn& d : inst.demands) {
    if (d.kind != DemandFn::Kind::Threshold) return false;
  }
  return true;
}

// best over q in [0,1] of p * sum_t min(q, d_t) - q * total_cost, given the
// demand values d_t at a fixed price p
std::pair<double, double> best_over_quantity(double p, std::vector<double> ds,
                                             double total_cost) {
  std::sort(ds.begin(), ds.end());
  const std::size_t n = ds.size();
  std::vector<double> prefix(n + 1, 0.0);
  for (std::size_t i = 0; i < n; ++i) prefix[i + 1] = prefix[i] + ds[i];

  auto value = [&](double q) {
    // number of d < q via binary search
    const std::size_t k =
        std::lower_bound(ds.begin(), ds.end(), q) - ds.begin();
    const double sum_min = prefix[k] + q * static_cast<double>(n - k);
    return p * sum_min - q * total_cost;
  };
  double best_q = 0.0, best = value(0.0);
  if (value(1.0) > best) {
    best = value(1.0);
    best_q = 1.0;
  }
  for (double d : ds) {
    if (value(d) > best) {
      best = value(d);
      best_q = d;
    }
  }
  return {best_q, best};
}

}  // namespace

FixedAction best_fixed_action(const AdversarialInstance& inst) {
  const int T = inst.horizon();
  double total_cost = 0;
  for (double c : inst.costs) total_cost += c;

  if (all_threshold(inst)) {
    // welfare(p, q) = q (p N(p) - total_cost) with N(p) = #{t : v_t >= p};
    // linear in q and p N(p) peaks at a valuation, so candidates are exact
    std::vector<double> vs;
    vs.reserve(T);
    for (const DemandFn& d : inst.demands) vs.push_back(d.v);
    std::sort(vs.begin(), vs.end(), std::greater<double>());
    FixedAction act{0.0, 0.0, 0.0};  // q = 0 earns nothing but never loses
    for (int i = 0; i < T; ++i) {
      const double val = vs[i] * (i + 1) - total_cost;
      if (val > act.value) {
        act = {vs[i], 1.0, val};
      }
    }
    return act;
  }

  std::set<double> candidates = {0.0, 1.0};
  for (const DemandFn& d : inst.demands) {
    switch (d.kind) {
      case DemandFn::Kind::Threshold:
        candidates.insert(d.v);
        break;
      case DemandFn::Kind::Linear:
        if (d.b > 0) {
          for (double p : {d.a / d.b, (d.a - 1.0) / d.b, d.a / (2.0 * d.b)}) {
            if (p >= 0 && p <= 1) candidates.insert(p);
          }
        }
        break;
      case DemandFn::Kind::Piecewise:
        for (const auto& [x, y] : d.steps) candidates.insert(x);
        break;
    }
  }
  for (int i = 0; i <= 10000; ++i) candidates.insert(i * 1e-4);

  FixedAction act{0.0, 0.0, 0.0};
  std::vector<double> ds(T);
  for (double p : candidates) {
    for (int t = 0; t < T; ++t) ds[t] = inst.demands[t](p);
    const auto [q, val] = best_over_quantity(p, ds, total_cost);
    if (val > act.value) act = {p, q, val};
  }
  return act;
}

double best_fixed_welfare(const AdversarialInstance& inst) {
  return best_fixed_action(inst).value;
}

double discretization_gap(const AdversarialInstance& inst, double gamma) {
  const int T = inst.horizon();
  const int K = static_cast<int>(std::ceil(1.0 / gamma));
  double best_grid = -std::numeric_limits<double>::infinity();
  for (int i = 1; i <= K; ++i) {
    const double p = (i - 1) * gamma;
    for (int j = 1; j <= K + 1; ++j) {
      const double q = j == K + 1 ? 1.0 : (j - 1) * gamma;
      double acc = 0;
      for (int t = 0; t < T; ++t) {
        acc += welfare(p, q, inst.costs[t], inst.demands[t](p));
      }
      best_grid = std::max(best_grid, acc);
    }
  }
  return best_fixed_welfare(inst) - best_grid;
}

VIResult run_adversarial(const AdversarialInstance& inst, double gamma,
                         double eta, SplitRng rng) {
  const int T = inst.horizon();
  Exp3Vi algo(gamma, eta);
  VIResult res;
  res.rounds.reserve(T);
  for (int t = 1; t <= T; ++t) {
    const auto [i, j] = algo.act(rng);
    const double p = algo.price(i);
    const double q = algo.quantity(j);
    const double d = inst.demands[t - 1](p);
    const double feedback = std::min(q, d);
    const double rho = welfare(p, q, inst.costs[t - 1], d);
    algo.update(i, j, feedback, inst.costs[t - 1]);

    VIRoundRecord rec;
    rec.t = t;
    rec.i = i;
    rec.j = j;
    rec.price = p;
    rec.quantity = q;
    rec.feedback = feedback;
    rec.welfare = rho;
    res.rounds.push_back(rec);
    res.realized_welfare += rho;
  }
  res.best_fixed_welfare = best_fixed_welfare(inst);
  res.cumulative_regret = res.best_fixed_welfare - res.realized_welfare;
  const int K = algo.K();
  res.eq5_bound = eta * K * T * std::log(std::exp(1.0) * K / gamma) +
                  4.0 * std::log(static_cast<double>(K + 1)) / eta +
                  4.0 * gamma * T;
  res.simplified_bound =
      3.0 * (4.0 + 3.0 * std::log(static_cast<double>(T))) *
      std::pow(static_cast<double>(T), 2.0 / 3.0);
  return res;
}

double verify_lemma2(const std::vector<std::vector<double>>& losses,
                     double eta) {
  if (losses.empty()) throw std::invalid_argument("verify_lemma2: empty");
  const std::size_t K = losses.front().size();
  std::vector<double> cum(K, 0.0);
  double lhs_mix = 0;   // sum_t sum_i p_t(i) l_t(i)
  double quad = 0;      // sum_t sum_i p_t(i) l_t(i)^2
  std::vector<double> arm_loss(K, 0.0);
  for (const std::vector<double>& row : losses) {
    if (row.size() != K) throw std::invalid_argument("ragged loss matrix");
    const double shift = *std::min_element(cum.begin(), cum.end());
    double total = 0;
    std::vector<double> p(K);
    for (std::size_t i = 0; i < K; ++i) {
      p[i] = std::exp(-eta * (cum[i] - shift));
      total += p[i];
    }
    for (std::size_t i = 0; i < K; ++i) {
      if (row[i] < 0) {
        throw std::invalid_argument("verify_lemma2: losses must be >= 0");
      }
      p[i] /= total;
      lhs_mix += p[i] * row[i];
      quad += p[i] * row[i] * row[i];
      arm_loss[i] += row[i];
      cum[i] += row[i];
    }
  }
  const double rhs = std::log(static_cast<double>(K)) / eta + 0.5 * eta * quad;
  double min_slack = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < K; ++k) {
    min_slack = std::min(min_slack, rhs - (lhs_mix - arm_loss[k]));
  }
  return min_slack;
}

// ---------------------------------------------------------------------------
// instance I/O

AdversarialInstance read_instance_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  AdversarialInstance inst;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ss(line);
    std::string cost_s, family, params;
    if (!std::getline(ss, cost_s, '\t') || !std::getline(ss, family, '\t')) {
      throw std::runtime_error("instance line " + std::to_string(lineno) +
                               ": expected cost<TAB>family<TAB>params");
    }
    std::getline(ss, params);
    const double cost = std::stod(cost_s);
    if (cost < 0 || cost > 1) {
      throw std::runtime_error("instance line " + std::to_string(lineno) +
                               ": cost outside [0,1]");
    }
    std::istringstream ps(params);
    if (family == "threshold") {
      double v;
      ps >> v;
      inst.demands.push_back(DemandFn::threshold(v));
    } else if (family == "linear") {
      double a, b;
      ps >> a >> b;
      inst.demands.push_back(DemandFn::linear(a, b));
    } else if (family == "piecewise") {
      std::vector<std::pair<double, double>> steps;
      double x, y;
      while (ps >> x >> y) steps.emplace_back(x, y);
      inst.demands.push_back(DemandFn::piecewise(std::move(steps)));
    } else {
      throw std::runtime_error("instance line " + std::to_string(lineno) +
                               ": unknown family '" + family + "'");
    }
    inst.costs.push_back(cost);
  }
  return inst;
}

void write_instance_file(const AdversarialInstance& inst,
                         const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path);
  char buf[64];
  for (int t = 0; t < inst.horizon(); ++t) {
    std::snprintf(buf, sizeof(buf), "%.17g", inst.costs[t]);
    out << buf << '\t';
    const DemandFn& d = inst.demands[t];
    switch (d.kind) {
      case DemandFn::Kind::Threshold:
        std::snprintf(buf, sizeof(buf), "%.17g", d.v);
        out << "threshold\t" << buf;
        break;
      case DemandFn::Kind::Linear:
        out << "linear\t";
        std::snprintf(buf, sizeof(buf), "%.17g", d.a);
        out << buf << ' ';
        std::snprintf(buf, sizeof(buf), "%.17g", d.b);
        out << buf;
        break;
      case DemandFn::Kind::Piecewise: {
        out << "piecewise\t";
        bool first = true;
        for (const auto& [x, y] : d.steps) {
          if (!first) out << ' ';
          first = false;
          std::snprintf(buf, sizeof(buf), "%.17g", x);
          out << buf << ' ';
          std::snprintf(buf, sizeof(buf), "%.17g", y);
          out << buf;
        }
        break;
      }
    }
    out << '\n';
  }
}

AdversarialInstance make_iid_uniform_posted_price(int horizon, SplitRng rng) {
  AdversarialInstance inst;
  inst.costs.assign(horizon, 0.0);
  inst.demands.reserve(horizon);
  for (int t = 0; t < horizon; ++t) {
    inst.demands.push_back(DemandFn::threshold(rng.uniform01()));
  }
  return inst;
}

}  // namespace supplychain
