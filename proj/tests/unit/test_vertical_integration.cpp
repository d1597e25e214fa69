#include <cmath>
#include <cstdio>
#include <numeric>
#include <vector>

#include "doctest.h"
#include "supplychain/rng.hpp"
#include "supplychain/vertical_integration.hpp"

using supplychain::AdversarialInstance;
using supplychain::DemandFn;
using supplychain::Exp3Vi;
using supplychain::SplitRng;

TEST_CASE("welfare and loss mapping") {
  CHECK(supplychain::welfare(0.5, 1.0, 0.0, 1.0) ==
        0.5);
  // pricing above a threshold valuation sells nothing
  DemandFn d = DemandFn::threshold(0.4);
  CHECK(supplychain::welfare(0.6, 1.0, 0.0, d(0.6)) ==
        0.0);
  // selling at a loss is possible
  CHECK(supplychain::welfare(0.4, 0.8, 0.5, 0.3) ==
        doctest::Approx(-0.28).epsilon(1e-15));

  CHECK(supplychain::loss_from_welfare(1.0) == 0.0);
  CHECK(supplychain::loss_from_welfare(-1.0) ==
        1.0);
  CHECK(supplychain::loss_from_welfare(-0.28) ==
        doctest::Approx(0.64).epsilon(1e-15));
}

TEST_CASE("demand representations validate and evaluate") {
  DemandFn lin = DemandFn::linear(1.2, 1.0);
  CHECK(lin(0.0) == 1.0);   // clamped above
  CHECK(lin(0.5) == doctest::Approx(0.7).epsilon(1e-15));
  CHECK(lin(1.0) == doctest::Approx(0.2).epsilon(1e-15));
  CHECK_THROWS(DemandFn::linear(1.0, -0.5));  // increasing demand

  DemandFn pw = DemandFn::piecewise({{0.0, 0.9}, {0.3, 0.5}, {0.7, 0.1}});
  CHECK(pw(0.0) == 0.9);
  CHECK(pw(0.29) == 0.9);
  CHECK(pw(0.3) == 0.5);
  CHECK(pw(0.9) == 0.1);
  CHECK_THROWS(DemandFn::piecewise({{0.0, 0.2}, {0.5, 0.8}}));  // increasing
  CHECK_THROWS(DemandFn::piecewise({{0.1, 0.5}}));              // no p = 0
  CHECK_THROWS(DemandFn::threshold(1.5));
}

TEST_CASE("grid initialization at gamma = 0.5") {
  Exp3Vi algo(0.5, 0.1);
  CHECK(algo.K() == 2);
  auto pi = algo.pi();
  REQUIRE(pi.size() == 6);
  for (double x : pi) CHECK(x == doctest::Approx(1.0 / 6.0).epsilon(1e-12));
  auto mu = algo.mu();
  for (int i = 1; i <= 2; ++i) {
    CHECK(mu[algo.index(i, 3)] == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
    CHECK(mu[algo.index(i, 1)] == doctest::Approx(1.0 / 12.0).epsilon(1e-12));
    CHECK(mu[algo.index(i, 2)] == doctest::Approx(1.0 / 12.0).epsilon(1e-12));
  }
  // grid coordinates: prices (i-1)gamma, quantities (j-1)gamma with the
  // last point pinned to 1
  CHECK(algo.price(1) == 0.0);
  CHECK(algo.price(2) == 0.5);
  CHECK(algo.quantity(1) == 0.0);
  CHECK(algo.quantity(2) == 0.5);
  CHECK(algo.quantity(3) == 1.0);
}

TEST_CASE("loss estimator is unbiased as an exact finite sum") {
  for (double gamma : {0.5, 0.2, 0.1}) {  // K = 2, 5, 10
    Exp3Vi base(gamma, 0.05);
    const int K = base.K();
    // make pi non-uniform with a few arbitrary but valid update rounds
    SplitRng rng(K);
    for (int r = 0; r < 5; ++r) {
      auto [i, j] = base.act(rng);
      double d = rng.uniform01();
      base.update(i, j, std::min(base.quantity(j), d), rng.uniform01());
    }
    const auto mu = base.mu();

    // one fixed synthetic round
    const double cost = 0.35;
    DemandFn demand = DemandFn::linear(0.9, 0.6);

    std::vector<double> expected(mu.size(), 0.0);
    for (int I = 1; I <= K; ++I) {
      for (int J = 1; J <= K + 1; ++J) {
        Exp3Vi clone = base;
        const double p = clone.price(I);
        const double q = clone.quantity(J);
        clone.update(I, J, std::min(q, demand(p)), cost);
        const auto& after = clone.cumulative_losses();
        const auto& before = base.cumulative_losses();
        const double outcome_prob = mu[base.index(I, J)];
        for (std::size_t n = 0; n < after.size(); ++n) {
          expected[n] += outcome_prob * (after[n] - before[n]);
        }
      }
    }
    for (int i = 1; i <= K; ++i) {
      for (int j = 1; j <= K + 1; ++j) {
        const double p = base.price(i);
        const double q = base.quantity(j);
        const double truth = supplychain::loss_from_welfare(
            supplychain::welfare(p, q, cost, demand(p)));
        CHECK(std::abs(expected[base.index(i, j)] - truth) <= 1e-12);
      }
    }
  }
}

TEST_CASE("censored feedback suffices for every updatable cell") {
  SplitRng rng(17);
  for (int round = 0; round < 1000; ++round) {
    DemandFn d = [&]() {
      switch (rng.uniform_index(3)) {
        case 0:
          return DemandFn::threshold(rng.uniform01());
        case 1:
          return DemandFn::linear(rng.uniform01(), rng.uniform01());
        default:
          return DemandFn::piecewise(
              {{0.0, 0.6 + 0.4 * rng.uniform01()},
               {0.5, 0.5 * rng.uniform01()}});
      }
    }();
    const double gamma = 0.2;
    const int K = 5;
    const double p = gamma * static_cast<double>(rng.uniform_index(K));
    const int J = 1 + static_cast<int>(rng.uniform_index(K + 1));
    const double Q = J == K + 1 ? 1.0 : (J - 1) * gamma;
    const double truth = d(p);
    const double feedback = std::min(Q, truth);
    const double cost = rng.uniform01();
    for (int j = 1; j <= J; ++j) {
      const double qj = j == K + 1 ? 1.0 : (j - 1) * gamma;
      const double from_censored = supplychain::loss_from_welfare(
          supplychain::welfare(p, qj, cost, std::min(qj, feedback)));
      const double from_truth = supplychain::loss_from_welfare(
          supplychain::welfare(p, qj, cost, truth));
      CHECK(from_censored == from_truth);
    }
  }
}

TEST_CASE("estimates never exceed the exploration floor K / gamma") {
  const double gamma = 0.25, eta = 0.05;
  Exp3Vi algo(gamma, eta);
  const double cap = algo.K() / gamma;
  SplitRng rng(23);
  std::vector<double> prev = algo.cumulative_losses();
  for (int t = 0; t < 500; ++t) {
    auto [i, j] = algo.act(rng);
    double d = rng.uniform01();
    algo.update(i, j, std::min(algo.quantity(j), d), rng.uniform01());
    const auto& cur = algo.cumulative_losses();
    for (std::size_t n = 0; n < cur.size(); ++n) {
      CHECK(cur[n] - prev[n] <= cap + 1e-9);
      CHECK(cur[n] - prev[n] >= -1e-15);
    }
    prev = cur;
  }
}

TEST_CASE("distribution normalization after many updates") {
  Exp3Vi algo(0.1, 0.02);
  SplitRng rng(31);
  for (int t = 0; t < 300; ++t) {
    auto [i, j] = algo.act(rng);
    double d = rng.uniform01();
    algo.update(i, j, std::min(algo.quantity(j), d), rng.uniform01());
    auto pi = algo.pi();
    auto mu = algo.mu();
    CHECK(std::abs(std::accumulate(pi.begin(), pi.end(), 0.0) - 1.0) <= 1e-12);
    CHECK(std::abs(std::accumulate(mu.begin(), mu.end(), 0.0) - 1.0) <= 1e-12);
    // forced exploration keeps the full-stock column sampled on every row
    for (int i2 = 1; i2 <= algo.K(); ++i2) {
      CHECK(mu[algo.index(i2, algo.K() + 1)] >=
            algo.gamma() / algo.K() - 1e-12);
    }
  }
}

TEST_CASE("weights depend only on cumulative estimated losses") {
  Exp3Vi a(0.2, 0.05), b(0.2, 0.05);
  SplitRng ra(7), rb(7);
  for (int t = 0; t < 50; ++t) {
    auto [i, j] = a.act(ra);
    auto [i2, j2] = b.act(rb);
    CHECK(i == i2);
    CHECK(j == j2);
    double d = 0.3 + 0.001 * t;
    a.update(i, j, std::min(a.quantity(j), d), 0.2);
    b.update(i2, j2, std::min(b.quantity(j2), d), 0.2);
  }
  auto pa = a.pi(), pb = b.pi();
  for (std::size_t n = 0; n < pa.size(); ++n) CHECK(pa[n] == pb[n]);
}

TEST_CASE("feedback above the stocked quantity is a protocol violation") {
  Exp3Vi algo(0.5, 0.1);
  SplitRng rng(2);
  auto [i, j] = algo.act(rng);
  CHECK_THROWS(algo.update(i, 1, 0.4, 0.1));  // q'_1 = 0 but feedback 0.4
}

TEST_CASE("exponential-weights inequality: closed-form slacks") {
  const double eta = 0.1;
  const int T = 50;
  SUBCASE("constant symmetric losses") {
    std::vector<std::vector<double>> losses(T, std::vector<double>(4, 0.5));
    double slack = supplychain::verify_lemma2(losses, eta);
    CHECK(slack ==
          doctest::Approx(std::log(4.0) / eta + eta * T / 8.0).epsilon(1e-9));
  }
  SUBCASE("single arm") {
    std::vector<std::vector<double>> losses(T, std::vector<double>(1, 0.7));
    double slack = supplychain::verify_lemma2(losses, eta);
    CHECK(slack == doctest::Approx(0.5 * eta * T * 0.49).epsilon(1e-9));
  }
  SUBCASE("negative losses rejected") {
    std::vector<std::vector<double>> losses(3, std::vector<double>(2, 0.1));
    losses[1][0] = -0.2;
    CHECK_THROWS(supplychain::verify_lemma2(losses, eta));
  }
}

TEST_CASE("exponential-weights inequality: random fuzz") {
  SplitRng rng(101);
  for (int rep = 0; rep < 100; ++rep) {
    std::vector<std::vector<double>> losses(200, std::vector<double>(5));
    for (auto& row : losses) {
      for (double& x : row) x = rng.uniform01();
    }
    CHECK(supplychain::verify_lemma2(losses, 0.1) >= 0.0);
  }
}

TEST_CASE("best fixed action on posted-price instances") {
  // constant valuation, zero cost: charge the valuation and stock fully
  AdversarialInstance inst;
  for (int t = 0; t < 10; ++t) {
    inst.costs.push_back(0.0);
    inst.demands.push_back(DemandFn::threshold(0.6));
  }
  auto act = supplychain::best_fixed_action(inst);
  CHECK(act.p == doctest::Approx(0.6).epsilon(1e-12));
  CHECK(act.q == 1.0);
  CHECK(act.value == doctest::Approx(6.0).epsilon(1e-12));
}

TEST_CASE("best fixed action matches a fine scan on mixed instances") {
  SplitRng rng(55);
  AdversarialInstance inst;
  for (int t = 0; t < 8; ++t) {
    inst.costs.push_back(0.3 * rng.uniform01());
    if (t % 2 == 0) {
      inst.demands.push_back(DemandFn::threshold(rng.uniform01()));
    } else {
      inst.demands.push_back(
          DemandFn::linear(0.5 + 0.5 * rng.uniform01(), rng.uniform01()));
    }
  }
  double scan_best = 0.0;
  for (int pi = 0; pi <= 500; ++pi) {
    double p = pi / 500.0;
    for (int qi = 0; qi <= 500; ++qi) {
      double q = qi / 500.0;
      double acc = 0;
      for (int t = 0; t < 8; ++t) {
        acc += supplychain::welfare(p, q, inst.costs[t], inst.demands[t](p));
      }
      scan_best = std::max(scan_best, acc);
    }
  }
  CHECK(supplychain::best_fixed_welfare(inst) >= scan_best - 1e-9);
}

TEST_CASE("grid coverage loss stays within the Lipschitz budget") {
  SUBCASE("threshold off the grid") {
    AdversarialInstance inst;
    inst.costs.push_back(0.0);
    inst.demands.push_back(DemandFn::threshold(0.37));
    double gap = supplychain::discretization_gap(inst, 0.1);
    CHECK(gap == doctest::Approx(0.07).epsilon(1e-9));
    CHECK(gap <= 2 * 0.1 * 1);
  }
  SUBCASE("threshold exactly representable on the grid") {
    AdversarialInstance inst;
    inst.costs.push_back(0.0);
    inst.demands.push_back(DemandFn::threshold(0.5));
    CHECK(supplychain::discretization_gap(inst, 0.25) ==
          doctest::Approx(0.0).epsilon(1e-12));
  }
  SUBCASE("linear demand with the vertex on the grid") {
    AdversarialInstance inst;
    inst.costs.push_back(0.0);
    inst.demands.push_back(DemandFn::linear(1.0, 1.0));
    CHECK(supplychain::discretization_gap(inst, 0.25) ==
          doctest::Approx(0.0).epsilon(1e-12));
  }
}

TEST_CASE("adversarial run: structure, bounds, and determinism") {
  SplitRng rng(5);
  AdversarialInstance inst = supplychain::make_iid_uniform_posted_price(
      400, rng.substream(0));
  auto res =
      supplychain::run_adversarial(inst, 0.2, 0.05, rng.substream(1));
  REQUIRE(res.rounds.size() == 400);
  for (const auto& r : res.rounds) {
    CHECK(r.feedback <= r.quantity + 1e-12);
    CHECK(r.welfare >= -1.0);
    CHECK(r.welfare <= 1.0);
  }
  CHECK(res.cumulative_regret ==
        doctest::Approx(res.best_fixed_welfare - res.realized_welfare)
            .epsilon(1e-12));
  auto res2 =
      supplychain::run_adversarial(inst, 0.2, 0.05, rng.substream(1));
  CHECK(res2.realized_welfare == res.realized_welfare);
  CHECK(res2.rounds.back().i == res.rounds.back().i);
}

TEST_CASE("instance files round trip") {
  AdversarialInstance inst;
  inst.costs = {0.1, 0.25, 0.0};
  inst.demands.push_back(DemandFn::threshold(0.42));
  inst.demands.push_back(DemandFn::linear(0.9, 0.6));
  inst.demands.push_back(DemandFn::piecewise({{0.0, 0.8}, {0.4, 0.2}}));
  const std::string path = "test_instance_roundtrip.tsv";
  supplychain::write_instance_file(inst, path);
  AdversarialInstance back = supplychain::read_instance_file(path);
  std::remove(path.c_str());
  REQUIRE(back.horizon() == 3);
  for (int t = 0; t < 3; ++t) {
    CHECK(back.costs[t] == inst.costs[t]);
    for (int i = 0; i <= 20; ++i) {
      double p = i / 20.0;
      CHECK(back.demands[t](p) == inst.demands[t](p));
    }
  }
}
