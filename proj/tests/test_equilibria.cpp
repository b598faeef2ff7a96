#include "doctest.h"

#include <cmath>

#include "ewanet/equilibria.hpp"
#include "ewanet/rng.hpp"

using namespace ewanet;

namespace {

const PayoffMatrix example1 = PayoffMatrix::make(4, -2, 1, 2);
const Graph dyad = Graph::from_edges(2, {{0, 1}});

BehavioralParams random_params(CounterRng& rng, int n) {
  BehavioralParams p;
  p.psi.resize(n);
  p.lambda.resize(n);
  p.eta.resize(n);
  for (int i = 0; i < n; ++i) {
    p.psi[i] = rng.uniform(0.3, 2.0);
    p.lambda[i] = rng.uniform(0.3, 2.0);
    p.eta[i] = rng.uniform(0.0, 1.0);
  }
  return p;
}

}  // namespace

TEST_CASE("neutral Jacobian reproduces the star-example matrix") {
  const Graph star = Graph::from_edges(3, {{0, 1}, {0, 2}});
  BehavioralParams params;
  params.psi = {1.0, 1.0, 0.5};
  params.lambda = {0.5, 0.5, 1.0};
  params.eta = {0.5, 0.5, 0.5};
  const PayoffMatrix sym = PayoffMatrix::symmetric(2, -1);
  const auto J = jacobian({0.0, 0.0, 0.0}, star, sym, params);
  CHECK(J(0, 0) == doctest::Approx(-0.875).epsilon(1e-12));
  CHECK(J(0, 1) == doctest::Approx(0.5625).epsilon(1e-12));
  CHECK(J(0, 2) == doctest::Approx(1.125).epsilon(1e-12));
  CHECK(J(1, 0) == doctest::Approx(0.5625).epsilon(1e-12));
  CHECK(J(1, 1) == doctest::Approx(-0.9375).epsilon(1e-12));
  CHECK(J(1, 2) == 0.0);
  CHECK(J(2, 0) == doctest::Approx(0.5625).epsilon(1e-12));
  CHECK(J(2, 1) == 0.0);
  CHECK(J(2, 2) == doctest::Approx(-0.375).epsilon(1e-12));
}

TEST_CASE("analytic Jacobian agrees with central finite differences") {
  CounterRng rng(61);
  for (int trial = 0; trial < 10; ++trial) {
    const int n = 3 + int(rng.next_u64() % 4);
    const Graph g = erdos_renyi(n, 0.6, rng.next_u64(), true, 2000);
    const auto params = random_params(rng, n);
    std::vector<double> q(n);
    for (auto& v : q) v = rng.uniform(-4.0, 4.0);

    const DriftEvaluator drift(g, example1, params);
    const auto J = drift.jacobian(q);
    const double h = 1e-6;
    for (int j = 0; j < n; ++j) {
      auto qp = q, qm = q;
      qp[j] += h;
      qm[j] -= h;
      const auto fp = drift(qp), fm = drift(qm);
      for (int i = 0; i < n; ++i) {
        const double fd = (fp[i] - fm[i]) / (2 * h);
        CHECK(std::abs(J(i, j) - fd) <= 1e-6);
      }
    }
  }
}

TEST_CASE("dyad census: bistable regime has 3 roots, 2 stable") {
  const auto params = BehavioralParams::uniform(2, 0.5, 1.0, 1.0);
  const BECensus census = find_fixed_points(dyad, example1, params);
  CHECK(census.records.size() == 3);
  CHECK(census.stable_count() == 2);
  CHECK(count_be(census) == 2);
  for (const auto& r : census.records) {
    CHECK(r.residual <= 1e-10);
    for (double p : r.p_star) {
      CHECK(p > 0.0);
      CHECK(p < 1.0);
    }
  }
  // The unstable root separates two stable ones on the diagonal.
  int unstable = 0;
  for (const auto& r : census.records)
    if (!r.stable) ++unstable;
  CHECK(unstable == 1);
}

TEST_CASE("dyad census: forgetful regime has a unique positive root") {
  const auto params = BehavioralParams::uniform(2, 1.0, 0.5, 1.0);
  const BECensus census = find_fixed_points(dyad, example1, params);
  REQUIRE(census.records.size() == 1);
  CHECK(census.records[0].stable);
  CHECK(census.records[0].q_star[0] > 0);
  CHECK(census.records[0].q_star[1] > 0);
}

TEST_CASE("stable roots attract small perturbations, unstable ones escape") {
  const auto params = BehavioralParams::uniform(2, 0.5, 1.0, 1.0);
  const BECensus census = find_fixed_points(dyad, example1, params);
  CounterRng rng(67);
  for (const auto& rec : census.records) {
    bool escaped = false;
    for (int k = 0; k < 10; ++k) {
      std::vector<double> q0 = rec.q_star;
      double norm = 0;
      std::vector<double> dir(q0.size());
      for (auto& d : dir) {
        d = rng.uniform(-1, 1);
        norm += d * d;
      }
      norm = std::sqrt(norm);
      for (std::size_t i = 0; i < q0.size(); ++i) q0[i] += 1e-3 * dir[i] / norm;
      IntegratorOptions opt;
      opt.horizon = 400;
      const auto traj = integrate(q0, dyad, example1, params, opt);
      double dist = 0;
      for (std::size_t i = 0; i < q0.size(); ++i)
        dist = std::max(dist, std::abs(traj.final_q()[i] - rec.q_star[i]));
      if (rec.stable) {
        CHECK(dist <= 1e-4);
      } else if (dist > 1e-2) {
        escaped = true;
      }
    }
    if (!rec.stable) CHECK(escaped);
  }
}

TEST_CASE("census is saturated: doubling the random starts finds no new roots") {
  CounterRng rng(71);
  for (int trial = 0; trial < 4; ++trial) {
    const int n = 3 + int(rng.next_u64() % 3);
    const Graph g = erdos_renyi(n, 0.7, rng.next_u64(), true, 2000);
    const auto params = random_params(rng, n);
    CensusOptions opt;
    const BECensus a = find_fixed_points(g, example1, params, opt);
    opt.random_starts *= 2;
    const BECensus b = find_fixed_points(g, example1, params, opt);
    REQUIRE(a.records.size() == b.records.size());
    for (std::size_t k = 0; k < a.records.size(); ++k) {
      double dist = 0;
      for (std::size_t i = 0; i < a.records[k].q_star.size(); ++i)
        dist = std::max(dist,
                        std::abs(a.records[k].q_star[i] - b.records[k].q_star[i]));
      CHECK(dist <= opt.dedup_radius);
    }
  }
}

TEST_CASE("parallel and serial census agree") {
  const Graph g = erdos_renyi(6, 0.5, 13, true, 2000);
  const auto params = BehavioralParams::uniform(6, 0.5, 2.0, 1.0);
  const PayoffMatrix table2 = PayoffMatrix::make(3, -5, 0, 2);
  CensusOptions opt;
  opt.parallel = true;
  const BECensus a = find_fixed_points(g, table2, params, opt);
  opt.parallel = false;
  const BECensus b = find_fixed_points(g, table2, params, opt);
  REQUIRE(a.records.size() == b.records.size());
  for (std::size_t k = 0; k < a.records.size(); ++k)
    CHECK(a.records[k].stable == b.records[k].stable);
}

TEST_CASE("absorption probe: forgetful dyad always lands risk-dominant") {
  const auto params = BehavioralParams::uniform(2, 1.0, 0.5, 1.0);
  const auto report = risk_dominant_absorption_probe(dyad, example1, params, 12, 5);
  CHECK(report.all_risk_dominant);
  CHECK(report.failures == 0);
}

TEST_CASE("absorption probe: bistable dyad keeps an efficient basin") {
  const auto params = BehavioralParams::uniform(2, 0.5, 1.0, 1.0);
  const auto report = risk_dominant_absorption_probe(dyad, example1, params, 12, 5);
  CHECK(!report.all_risk_dominant);
  CHECK(report.failures > 0);
  for (const auto& endpoint : report.failing_endpoints)
    for (double v : endpoint) CHECK(v < 0);
}

TEST_CASE("small-lambda drift approaches the stated limit form") {
  CounterRng rng(73);
  for (int trial = 0; trial < 10; ++trial) {
    const int n = 3 + int(rng.next_u64() % 4);
    const Graph g = erdos_renyi(n, 0.6, rng.next_u64(), true, 2000);
    auto params = random_params(rng, n);
    params.lambda.assign(n, 1e-9);
    std::vector<double> q(n);
    for (auto& v : q) v = rng.uniform(-3, 3);
    const auto f = drift_q(q, g, example1, params);
    for (int i = 0; i < n; ++i) {
      const double limit = -params.psi[i] * q[i] +
                           ((example1.w + example1.x - example1.y - example1.z) / 2.0) *
                               ((1.0 + params.eta[i]) / 2.0) * g.degree(i);
      CHECK(f[i] == doctest::Approx(limit).epsilon(1e-6));
    }
    // At q = 0 the limit drift is elementwise positive for this payoff.
    const auto f0 = drift_q(std::vector<double>(n, 0.0), g, example1, params);
    for (double v : f0) CHECK(v > 0);
  }
}

TEST_CASE("census export carries the documented header") {
  const auto params = BehavioralParams::uniform(2, 1.0, 0.5, 1.0);
  const BECensus census = find_fixed_points(dyad, example1, params);
  const std::string csv = census_csv(census);
  CHECK(csv.rfind("root_id,stable,residual,q_0,q_1,p_0,p_1,max_re_eigenvalue\n", 0) == 0);
}
