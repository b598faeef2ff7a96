#include "doctest.h"

#include <cmath>

#include <Eigen/Eigenvalues>

#include "ewanet/influence.hpp"
#include "ewanet/rng.hpp"

using namespace ewanet;

namespace {

const Graph star = Graph::from_edges(3, {{0, 1}, {0, 2}});
const PayoffMatrix sym21 = PayoffMatrix::symmetric(2, -1);

BehavioralParams star_params() {
  BehavioralParams p;
  p.psi = {1.0, 1.0, 0.5};
  p.lambda = {0.5, 0.5, 1.0};
  p.eta = {0.5, 0.5, 0.5};
  return p;
}

}  // namespace

TEST_CASE("star example: dominant pair, influence weights, subdominant spectrum") {
  const InfluenceReport rep = influence_report(star, sym21, star_params());
  CHECK(rep.kappa1 == doctest::Approx(0.30704727).epsilon(1e-6));
  CHECK(rep.unstable);
  CHECK(rep.all_positive_v1);
  CHECK(rep.residual_right <= 1e-10);
  CHECK(rep.residual_left <= 1e-10);

  // v1 scaled so the third entry is 1.
  const double scale = rep.v1[2];
  CHECK(rep.v1[0] / scale == doctest::Approx(1.21252848).epsilon(1e-5));
  CHECK(rep.v1[1] / scale == doctest::Approx(0.54802842).epsilon(1e-5));

  CHECK(rep.xi[0] == doctest::Approx(0.32243322).epsilon(1e-5));
  CHECK(rep.xi[1] == doctest::Approx(0.14573065).epsilon(1e-5));
  CHECK(rep.xi[2] == doctest::Approx(0.53183612).epsilon(1e-5));
  CHECK(rep.xi[0] + rep.xi[1] + rep.xi[2] == doctest::Approx(1.0).epsilon(1e-12));

  REQUIRE(rep.full_spectrum_available);
  REQUIRE(rep.subdominant.size() == 2);
  CHECK(rep.subdominant[0] == doctest::Approx(-0.7584318).epsilon(1e-5));
  CHECK(rep.subdominant[1] == doctest::Approx(-1.73611547).epsilon(1e-5));
}

TEST_CASE("power iteration agrees with a dense eigensolver on random instances") {
  CounterRng rng(79);
  for (int trial = 0; trial < 8; ++trial) {
    const int n = 4 + int(rng.next_u64() % 10);
    const Graph g = erdos_renyi(n, 0.5, rng.next_u64(), true, 2000);
    BehavioralParams params;
    params.psi.resize(n);
    params.lambda.resize(n);
    params.eta.resize(n);
    for (int i = 0; i < n; ++i) {
      params.psi[i] = rng.uniform(0.2, 3.0);
      params.lambda[i] = rng.uniform(0.2, 3.0);
      params.eta[i] = rng.uniform(0.0, 1.0);
    }
    const InfluenceReport rep = influence_report(g, sym21, params);
    const Eigen::MatrixXd J = neutral_jacobian(g, sym21, params);
    Eigen::EigenSolver<Eigen::MatrixXd> es(J);
    double max_re = -1e300;
    for (int i = 0; i < n; ++i) max_re = std::max(max_re, es.eigenvalues()[i].real());
    CHECK(rep.kappa1 == doctest::Approx(max_re).epsilon(1e-8));
    for (double x : rep.xi) CHECK(x > 0);  // Perron weights on a connected graph
  }
}

TEST_CASE("homogeneous belief-based case collapses to the adjacency spectrum") {
  CounterRng rng(83);
  const int n = 12;
  const Graph g = erdos_renyi(n, 0.35, 17, true, 2000);
  const double psi = 1.3, lambda = 0.9, h = 2, l = -1;
  const auto params = BehavioralParams::uniform(n, psi, lambda, 1.0);
  const PayoffMatrix payoff = PayoffMatrix::symmetric(h, l);

  const Eigen::MatrixXd J = neutral_jacobian(g, payoff, params);
  for (int i = 0; i < n; ++i) {
    CHECK(J(i, i) == doctest::Approx(-psi));  // eta = 1 kills the diagonal degree term
    for (int j : g.neighbors(i))
      CHECK(J(i, j) == doctest::Approx(lambda * (h - l) / 2.0));
  }

  double kappa_adj = 0;
  const auto centrality = eigenvector_centrality(g, 1e-12, 200000, &kappa_adj);
  const InfluenceReport rep = influence_report(g, payoff, params);
  CHECK(rep.kappa1 ==
        doctest::Approx(-psi + lambda * (h - l) / 2.0 * kappa_adj).epsilon(1e-8));

  double sum = 0;
  for (double x : centrality) sum += x;
  for (int i = 0; i < n; ++i)
    CHECK(rep.xi[i] == doctest::Approx(centrality[i] / sum).epsilon(1e-6));
}

TEST_CASE("neutral stability matches the adjacency-eigenvalue condition") {
  const int n = 8;
  const Graph g = erdos_renyi(n, 0.4, 23, true, 2000);
  double kappa_adj = 0;
  eigenvector_centrality(g, 1e-12, 200000, &kappa_adj);
  const double lambda = 0.8, h = 2, l = -1;
  const double critical = lambda * (h - l) / 2.0 * kappa_adj;

  auto params = BehavioralParams::uniform(n, 1.1 * critical, lambda, 1.0);
  CHECK(neutral_stability(influence_report(g, PayoffMatrix::symmetric(h, l), params)));
  params = BehavioralParams::uniform(n, 0.9 * critical, lambda, 1.0);
  CHECK(!neutral_stability(influence_report(g, PayoffMatrix::symmetric(h, l), params)));
}

TEST_CASE("vanishing payoff contrast stabilizes the neutral state") {
  const auto params = BehavioralParams::uniform(3, 1.0, 1.0, 1.0);
  const InfluenceReport rep = influence_report(star, PayoffMatrix::symmetric(2.0, 1.999), params);
  CHECK(rep.kappa1 < 0);
  CHECK(neutral_stability(rep));
}

TEST_CASE("coordination prediction on the star example") {
  const InfluenceReport rep = influence_report(star, sym21, star_params());
  const std::vector<double> q0{0.1, 0.1, -0.18};
  double dot = 0;
  for (int i = 0; i < 3; ++i) dot += rep.xi[i] * q0[i];
  CHECK(dot == doctest::Approx(-0.049).epsilon(0.02));
  CHECK(predict_coordination(rep, q0) == CoordinationPrediction::C);
  CHECK(predict_coordination(rep, rep.v1) == CoordinationPrediction::D);
  CHECK(predict_coordination(rep, {0, 0, 0}) == CoordinationPrediction::Indeterminate);
}

TEST_CASE("prediction is scale free in q0") {
  const InfluenceReport rep = influence_report(star, sym21, star_params());
  CounterRng rng(89);
  for (int k = 0; k < 50; ++k) {
    std::vector<double> q0(3);
    for (auto& v : q0) v = rng.uniform(-1, 1);
    const auto base = predict_coordination(rep, q0);
    for (double s : {1e-6, 0.25, 40.0}) {
      auto scaled = q0;
      for (auto& v : scaled) v *= s;
      CHECK(predict_coordination(rep, scaled) == base);
    }
  }
}

TEST_CASE("prediction refuses a stable neutral state") {
  const auto params = BehavioralParams::uniform(3, 5.0, 0.2, 1.0);
  const InfluenceReport rep = influence_report(star, sym21, params);
  REQUIRE(!rep.unstable);
  CHECK_THROWS_AS(predict_coordination(rep, {1.0, 0.0, 0.0}), std::invalid_argument);
}

TEST_CASE("full spectrum reproduces the state at t = 0 and decays correctly") {
  const Eigen::MatrixXd J = neutral_jacobian(star, sym21, star_params());
  const EigenDecomposition dec = full_spectrum(J);
  REQUIRE(dec.complete);
  CounterRng rng(97);
  for (int k = 0; k < 10; ++k) {
    std::vector<double> q0(3);
    for (auto& v : q0) v = rng.uniform(-1, 1);
    const auto rebuilt = linearized_solution(dec, q0, 0.0);
    for (int i = 0; i < 3; ++i) CHECK(rebuilt[i] == doctest::Approx(q0[i]).epsilon(1e-8));
  }
}

TEST_CASE("principal term goes uniformly negative for the example start") {
  const Eigen::MatrixXd J = neutral_jacobian(star, sym21, star_params());
  const EigenDecomposition dec = full_spectrum(J);
  REQUIRE(dec.complete);
  const std::vector<double> q0{0.1, 0.1, -0.18};
  for (double t : {8.0, 12.0, 20.0}) {
    const auto qhat = principal_term(dec, q0, t);
    for (double v : qhat) CHECK(v < 0);
  }
}

TEST_CASE("linearized solution tracks the simulation in the intermediate window") {
  const Eigen::MatrixXd J = neutral_jacobian(star, sym21, star_params());
  const EigenDecomposition dec = full_spectrum(J);
  REQUIRE(dec.complete);
  CounterRng rng(101);
  std::vector<double> q0(3);
  for (auto& v : q0) v = rng.uniform(-1, 1);
  double norm = std::sqrt(q0[0] * q0[0] + q0[1] * q0[1] + q0[2] * q0[2]);
  for (auto& v : q0) v *= 1e-3 / norm;

  for (double t : {2.0, 6.0, 10.0}) {
    IntegratorOptions opt;
    opt.horizon = t;
    opt.conv_tol = 0;
    opt.dt = 1e-3;
    const auto traj = integrate(q0, star, sym21, star_params(), opt);
    const auto qhat = linearized_solution(dec, q0, traj.final_t());
    double err = 0;
    for (int i = 0; i < 3; ++i) err += (qhat[i] - traj.final_q()[i]) * (qhat[i] - traj.final_q()[i]);
    CHECK(std::sqrt(err) / 1e-3 <= 0.1);
  }
}

TEST_CASE("comparative statics on the star example") {
  const auto probe = comparative_statics_probe(star, sym21, star_params(), 2, 0.05);
  CHECK(probe.dxi_dpsi < 0);     // more forgetful, less influential
  CHECK(probe.dxi_dlambda > 0);  // h + l = 1 > 0: more accurate, more influential
}

TEST_CASE("belief-based agents gain influence from accuracy even when h + l < 0") {
  const PayoffMatrix payoff = PayoffMatrix::symmetric(1, -2);
  const int n = 6;
  const Graph g = erdos_renyi(n, 0.6, 29, true, 2000);
  const auto params = BehavioralParams::uniform(n, 1.0, 1.0, 1.0);
  const auto probe = comparative_statics_probe(g, payoff, params, 2, 0.05);
  CHECK(probe.dxi_dlambda > 0);
}

TEST_CASE("report export carries the per-agent table and the scalar block") {
  const InfluenceReport rep = influence_report(star, sym21, star_params());
  const std::string csv = influence_csv(rep, star, star_params());
  CHECK(csv.rfind("agent,xi,v1,degree,psi,lambda,eta\n", 0) == 0);
  CHECK(csv.find("\nkappa1,unstable\n") != std::string::npos);
}

TEST_CASE("asymmetric payoffs are refused") {
  CHECK_THROWS_AS(influence_report(star, PayoffMatrix::make(4, -2, 1, 2), star_params()),
                  std::invalid_argument);
}

TEST_CASE("prediction accuracy improves as the start shrinks toward neutral") {
  CounterRng rng(103);
  const double eps_grid[] = {1e-1, 1e-2, 1e-3};
  int correct[3] = {0, 0, 0};
  int total[3] = {0, 0, 0};
  int instances = 0;
  while (instances < 12) {
    const int n = 4 + int(rng.next_u64() % 5);
    const Graph g = erdos_renyi(n, 0.5, rng.next_u64(), true, 2000);
    const PayoffMatrix payoff =
        (rng.next_u64() & 1) ? PayoffMatrix::symmetric(2, -1) : PayoffMatrix::symmetric(1, -2);
    BehavioralParams params;
    params.psi.resize(n);
    params.lambda.resize(n);
    params.eta.resize(n);
    for (int i = 0; i < n; ++i) {
      params.psi[i] = rng.uniform(0.2, 2.0);
      params.lambda[i] = rng.uniform(0.5, 3.0);
      params.eta[i] = rng.uniform(0.0, 1.0);
    }
    const InfluenceReport rep = influence_report(g, payoff, params);
    if (!rep.unstable || !rep.all_positive_v1) continue;
    ++instances;

    for (int e = 0; e < 3; ++e) {
      for (int k = 0; k < 6; ++k) {
        std::vector<double> q0(n);
        double norm = 0;
        for (auto& v : q0) {
          v = rng.uniform(-1, 1);
          norm += v * v;
        }
        norm = std::sqrt(norm);
        for (auto& v : q0) v *= eps_grid[e] / norm;
        const auto pred = predict_coordination(rep, q0);
        if (pred == CoordinationPrediction::Indeterminate) continue;

        IntegratorOptions opt;
        opt.horizon = 1500;
        opt.conv_tol = 1e-8;
        const auto traj = integrate(q0, g, payoff, params, opt);
        if (traj.status != TerminalStatus::Converged) continue;
        bool all_d = true, all_c = true;
        for (double v : traj.final_q()) {
          all_d = all_d && v > 0;
          all_c = all_c && v < 0;
        }
        if (!all_d && !all_c) continue;
        ++total[e];
        const bool hit = (all_d && pred == CoordinationPrediction::D) ||
                         (all_c && pred == CoordinationPrediction::C);
        if (hit) ++correct[e];
      }
    }
  }
  REQUIRE(total[2] > 40);
  const double acc1 = double(correct[0]) / total[0];
  const double acc2 = double(correct[1]) / total[1];
  const double acc3 = double(correct[2]) / total[2];
  // Nondecreasing as eps shrinks, up to one miscount of sampling noise.
  CHECK(acc2 >= acc1 - 1.0 / total[1]);
  CHECK(acc3 >= acc2 - 1.0 / total[2]);
  CHECK(acc3 > 0.99);
}
