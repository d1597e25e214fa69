#include "supplychain/learners.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace supplychain {

int cube_root_ceil(int t) {
  int n = static_cast<int>(std::ceil(std::cbrt(static_cast<double>(t))));
  while (static_cast<long long>(n) * n * n < t) ++n;
  while (n > 1 && static_cast<long long>(n - 1) * (n - 1) * (n - 1) >= t) --n;
  return n;
}

double lipschitz_bound(double expected_cost, double expected_price,
                       double density_floor) {
  return (1.0 - expected_cost) / (expected_price * density_floor) + 1.0;
}

// ---------------------------------------------------------------------------
// EtcSupplier

EtcSupplier::EtcSupplier(int horizon, double expected_cost)
    : horizon_(horizon),
      grid_size_(static_cast<int>(std::floor(std::sqrt(
          static_cast<double>(horizon))))),
      expected_cost_(expected_cost) {
  if (horizon < 1) throw std::invalid_argument("EtcSupplier: T >= 1 required");
  while (static_cast<long long>(grid_size_ + 1) * (grid_size_ + 1) <= horizon)
    ++grid_size_;
  while (static_cast<long long>(grid_size_) * grid_size_ > horizon)
    --grid_size_;
}

double EtcSupplier::act(int t) {
  if (t < 1 || t > horizon_) {
    throw std::logic_error("EtcSupplier::act: round outside horizon");
  }
  if (t <= grid_size_) {
    return static_cast<double>(t) / (grid_size_ + 1);
  }
  if (!committed_) {
    // empirical argmax of q_s (w_s - E[C]); ties toward the smallest s
    double best = -std::numeric_limits<double>::infinity();
    for (std::size_t s = 0; s < wholesale_.size(); ++s) {
      const double val = quantity_[s] * (wholesale_[s] - expected_cost_);
      if (val > best) {
        best = val;
        committed_w_ = wholesale_[s];
      }
    }
    committed_ = true;
  }
  return committed_w_;
}

void EtcSupplier::observe(int t, double quantity, double /*cost*/) {
  if (t <= grid_size_) {
    wholesale_.push_back(static_cast<double>(t) / (grid_size_ + 1));
    quantity_.push_back(quantity);
  }
}

// ---------------------------------------------------------------------------
// PiyavskiiSupplier

PiyavskiiSupplier::PiyavskiiSupplier(int horizon, double lipschitz,
                                     double expected_cost)
    : horizon_(horizon), lipschitz_(lipschitz), expected_cost_(expected_cost) {
  if (lipschitz <= 0) {
    throw std::invalid_argument("PiyavskiiSupplier: M > 0 required");
  }
}

double PiyavskiiSupplier::act(int t) {
  if (t < 1 || t > horizon_) {
    throw std::logic_error("PiyavskiiSupplier::act: round outside horizon");
  }
  return next_w_;
}

void PiyavskiiSupplier::observe(int /*t*/, double quantity, double /*cost*/) {
  const double w = next_w_;
  const double f = quantity * (w - expected_cost_);
  auto it = std::lower_bound(
      evals_.begin(), evals_.end(), w,
      [](const std::pair<double, double>& e, double x) { return e.first < x; });
  if (it == evals_.end() || it->first != w) {
    evals_.insert(it, {w, f});
  }
  next_w_ = envelope_argmax();
}

double PiyavskiiSupplier::proxy(double w) const {
  double env = std::numeric_limits<double>::infinity();
  for (const auto& [ws, fs] : evals_) {
    env = std::min(env, fs + lipschitz_ * std::abs(ws - w));
  }
  return env;
}

double PiyavskiiSupplier::envelope_argmax() const {
  // All cones share slope M, so between two consecutive evaluated points the
  // envelope is min(a_l + M w, a_r - M w) with
  //   a_l = min over points to the left of (f_s - M w_s),
  //   a_r = min over points to the right of (f_s + M w_s).
  // The peak of each interval plus the domain endpoints cover every
  // candidate maximizer. Ties resolve toward the smallest w.
  const double M = lipschitz_;
  const std::size_t m = evals_.size();
  std::vector<double> prefix(m), suffix(m);
  for (std::size_t i = 0; i < m; ++i) {
    const double v = evals_[i].second - M * evals_[i].first;
    prefix[i] = i == 0 ? v : std::min(prefix[i - 1], v);
  }
  for (std::size_t i = m; i-- > 0;) {
    const double v = evals_[i].second + M * evals_[i].first;
    suffix[i] = i + 1 == m ? v : std::min(suffix[i + 1], v);
  }

  double best_w = 0.0;
  double best_v = suffix[0] - 0.0;  // envelope at w = 0 (everything is right)
  auto consider = [&](double w, double v) {
    if (v > best_v + 1e-15) {
      best_v = v;
      best_w = w;
    }
  };
  for (std::size_t i = 0; i + 1 < m; ++i) {
    const double wl = evals_[i].first, wr = evals_[i + 1].first;
    double w = (suffix[i + 1] - prefix[i]) / (2.0 * M);
    w = std::clamp(w, wl, wr);
    consider(w, std::min(prefix[i] + M * w, suffix[i + 1] - M * w));
  }
  consider(1.0, prefix[m - 1] + M * 1.0);  // envelope at w = 1
  return best_w;
}

// ---------------------------------------------------------------------------
// EtcNoCostSupplier

EtcNoCostSupplier::EtcNoCostSupplier(int horizon)
    : horizon_(horizon), grid_size_(cube_root_ceil(horizon)) {
  if (horizon < 12) {
    throw std::invalid_argument("EtcNoCostSupplier: T >= 12 required");
  }
  exploration_rounds_ = (grid_size_ + 1) * grid_size_;
}

double EtcNoCostSupplier::act(int t) {
  if (t < 1 || t > horizon_) {
    throw std::logic_error("EtcNoCostSupplier::act: round outside horizon");
  }
  if (t <= exploration_rounds_) {
    const int s = (t - 1) % grid_size_ + 1;
    return static_cast<double>(s) / (grid_size_ + 1);
  }
  if (!committed_) {
    const int n2 = grid_size_ * grid_size_;
    estimated_cost_ = 0;
    for (int j = 0; j < n2; ++j) estimated_cost_ += costs_[j];
    estimated_cost_ /= n2;

    int lo = n2;  // 0-based start of the commit argmax range
    if (lo >= exploration_rounds_) {
      fallback_used_ = true;
      lo = 0;
    }
    double best = -std::numeric_limits<double>::infinity();
    for (int s = lo; s < exploration_rounds_; ++s) {
      const double val = quantity_[s] * (wholesale_[s] - estimated_cost_);
      if (val > best) {
        best = val;
        committed_w_ = wholesale_[s];
      }
    }
    committed_ = true;
  }
  return committed_w_;
}

void EtcNoCostSupplier::observe(int t, double quantity, double cost) {
  if (t <= exploration_rounds_) {
    const int s = (t - 1) % grid_size_ + 1;
    wholesale_.push_back(static_cast<double>(s) / (grid_size_ + 1));
    quantity_.push_back(quantity);
    costs_.push_back(cost);
  }
}

// ---------------------------------------------------------------------------
// Retailers

ExactBestResponseRetailer::ExactBestResponseRetailer(
    const JointDistribution& dist)
    : dist_(&dist) {
  if (!dist.has_closed_forms()) {
    throw std::invalid_argument(
        "ExactBestResponseRetailer: needs a parametric family with a "
        "closed-form best response");
  }
}

double ExactBestResponseRetailer::act(int /*t*/, double wholesale) {
  return best_response(*dist_, wholesale);
}

FtlRetailer::FtlRetailer(int horizon, SplitRng rng)
    : horizon_(horizon), rng_(rng) {
  if (horizon < 12) {
    throw std::invalid_argument("FtlRetailer: T >= 12 required");
  }
  const int n = cube_root_ceil(horizon);
  for (int k = 1; k <= n; ++k) {
    grid_.push_back(static_cast<double>(k) / (n + 1));
  }
  revenue_sum_.assign(grid_.size(), 0.0);
}

double FtlRetailer::act(int t, double wholesale) {
  if (t == 1) {
    return grid_[rng_.uniform_index(grid_.size())];
  }
  // argmax over the grid of (1/(t-1)) sum_s min(q, D_s) P_s - q w_t;
  // ties toward the smallest q
  double best = -std::numeric_limits<double>::infinity();
  double best_q = grid_.front();
  for (std::size_t k = 0; k < grid_.size(); ++k) {
    const double val =
        revenue_sum_[k] / history_len_ - grid_[k] * wholesale;
    if (val > best) {
      best = val;
      best_q = grid_[k];
    }
  }
  return best_q;
}

void FtlRetailer::observe(int /*t*/, double price, double demand) {
  for (std::size_t k = 0; k < grid_.size(); ++k) {
    revenue_sum_[k] += std::min(grid_[k], demand) * price;
  }
  ++history_len_;
}

}  // namespace supplychain
