#include "ewanet/equilibria.hpp"

#include <algorithm>
#include <cmath>
#include <omp.h>
#include <optional>
#include <sstream>

#include "ewanet/rng.hpp"

namespace ewanet {

namespace {

double linf(const std::vector<double>& v) {
  double m = 0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

double linf_dist(const std::vector<double>& a, const std::vector<double>& b) {
  double m = 0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

// Damped Newton on F(q) = 0; backtracking halves the step whenever |F| would
// increase. Returns the root or nullopt.
std::optional<std::vector<double>> newton_solve(const DriftEvaluator& drift,
                                                std::vector<double> q, double tol,
                                                int max_iter) {
  const int n = drift.size();
  DriftWorkspace ws;
  std::vector<double> f(n), trial(n), ftrial(n);
  Eigen::MatrixXd J(n, n);
  drift.eval(q, 0.0, f, ws);
  double fnorm = linf(f);
  for (int iter = 0; iter < max_iter; ++iter) {
    if (fnorm <= tol) return q;
    drift.jacobian_into(q, 0.0, J, ws);
    Eigen::Map<const Eigen::VectorXd> fv(f.data(), n);
    Eigen::PartialPivLU<Eigen::MatrixXd> lu(J);
    const Eigen::VectorXd delta = lu.solve(-fv);
    if (!delta.allFinite()) return std::nullopt;
    double step = 1.0;
    bool accepted = false;
    for (int half = 0; half < 30; ++half) {
      for (int i = 0; i < n; ++i) trial[i] = q[i] + step * delta[i];
      drift.eval(trial, 0.0, ftrial, ws);
      const double tnorm = linf(ftrial);
      if (std::isfinite(tnorm) && tnorm < fnorm) {
        q = trial;
        f = ftrial;
        fnorm = tnorm;
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) return std::nullopt;
  }
  return std::nullopt;
}

FixedPointRecord classify(const DriftEvaluator& drift, std::vector<double> q, double margin) {
  FixedPointRecord rec;
  const int n = drift.size();
  rec.residual = linf(drift(q, 0.0));
  rec.p_star.resize(n);
  drift.probabilities(q, 0.0, rec.p_star);
  const Eigen::MatrixXd J = drift.jacobian(q, 0.0);
  Eigen::EigenSolver<Eigen::MatrixXd> es(J, /*computeEigenvectors=*/false);
  double max_re = -std::numeric_limits<double>::infinity();
  for (int i = 0; i < n; ++i) {
    rec.eigenvalues.push_back(es.eigenvalues()[i]);
    max_re = std::max(max_re, es.eigenvalues()[i].real());
    if (std::abs(es.eigenvalues()[i].real()) <= margin) rec.marginal = true;
  }
  rec.max_re_eigenvalue = max_re;
  rec.stable = max_re < -margin;
  rec.q_star = std::move(q);
  return rec;
}

}  // namespace

int BECensus::stable_count() const {
  int c = 0;
  for (const auto& r : records)
    if (r.stable && !r.marginal) ++c;
  return c;
}

Eigen::MatrixXd jacobian(const std::vector<double>& q, const Graph& g,
                         const PayoffMatrix& payoff, const BehavioralParams& params, double t) {
  return DriftEvaluator(g, payoff, params).jacobian(q, t);
}

BECensus find_fixed_points(const Graph& g, const PayoffMatrix& payoff,
                           const BehavioralParams& params, const CensusOptions& opt) {
  const DriftEvaluator drift(g, payoff, params);
  const int n = g.size();
  const auto bound = drift.drift_magnitude_bound();
  std::vector<double> box(n);
  for (int i = 0; i < n; ++i) box[i] = bound[i] / params.psi[i];

  std::vector<std::vector<double>> starts;
  if (n <= opt.corner_cap) {
    for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << n); ++mask) {
      std::vector<double> q(n);
      for (int i = 0; i < n; ++i) q[i] = ((mask >> i) & 1) ? box[i] : -box[i];
      starts.push_back(std::move(q));
    }
  }
  {
    CounterRng rng(opt.seed);
    for (int s = 0; s < opt.random_starts; ++s) {
      std::vector<double> q(n);
      for (int i = 0; i < n; ++i) q[i] = rng.uniform(-1.2 * box[i], 1.2 * box[i]);
      starts.push_back(std::move(q));
    }
  }

  // Forward integration: endpoints seed Newton and their initial conditions
  // become basin witnesses.
  std::vector<std::pair<std::vector<double>, std::vector<double>>> witness_pairs;
  {
    CounterRng rng(CounterRng::derive(opt.seed, 1));
    IntegratorOptions integ;
    integ.horizon = opt.forward_horizon;
    integ.conv_tol = std::max(opt.tol, 1e-10);
    std::vector<std::vector<double>> ics(opt.forward_starts, std::vector<double>(n));
    for (int s = 0; s < opt.forward_starts; ++s)
      for (int i = 0; i < n; ++i) ics[s][i] = rng.uniform(-box[i], box[i]);
    std::vector<std::vector<double>> endpoints(opt.forward_starts);
#pragma omp parallel for schedule(dynamic) if (opt.parallel)
    for (int s = 0; s < opt.forward_starts; ++s) {
      const Trajectory traj = integrate(ics[s], g, payoff, params, integ);
      if (traj.status == TerminalStatus::Converged) endpoints[s] = traj.final_q();
    }
    for (int s = 0; s < opt.forward_starts; ++s) {
      if (!endpoints[s].empty()) {
        witness_pairs.emplace_back(ics[s], endpoints[s]);
        starts.push_back(endpoints[s]);
      }
    }
  }

  const int total = static_cast<int>(starts.size());
  std::vector<std::optional<std::vector<double>>> roots(total);
#pragma omp parallel for schedule(dynamic) if (opt.parallel)
  for (int s = 0; s < total; ++s)
    roots[s] = newton_solve(drift, starts[s], opt.tol, opt.max_newton_iter);

  BECensus census;
  census.starts_used = total;
  std::vector<std::vector<double>> unique_roots;
  for (int s = 0; s < total; ++s) {
    if (!roots[s]) {
      ++census.failed_starts;
      continue;
    }
    bool merged = false;
    for (const auto& r : unique_roots) {
      if (linf_dist(r, *roots[s]) <= opt.dedup_radius) {
        ++census.duplicates_merged;
        merged = true;
        break;
      }
    }
    if (!merged) unique_roots.push_back(std::move(*roots[s]));
  }

  for (auto& root : unique_roots)
    census.records.push_back(classify(drift, std::move(root), opt.stability_margin));
  std::sort(census.records.begin(), census.records.end(),
            [](const FixedPointRecord& a, const FixedPointRecord& b) {
              return a.q_star < b.q_star;
            });
  for (const auto& [ic, endpoint] : witness_pairs) {
    for (auto& rec : census.records) {
      if (linf_dist(rec.q_star, endpoint) <= 10 * opt.dedup_radius) {
        rec.basin_witnesses.push_back(ic);
        break;
      }
    }
  }
  return census;
}

int count_be(const BECensus& census) { return census.stable_count(); }

AbsorptionReport risk_dominant_absorption_probe(const Graph& g, const PayoffMatrix& payoff,
                                                const BehavioralParams& params, int sample_starts,
                                                std::uint64_t seed,
                                                const IntegratorOptions& integ) {
  if (!validate(payoff).assumption4)
    throw std::invalid_argument(
        "risk_dominant_absorption_probe: payoff lacks the risk/efficiency conflict");
  const DriftEvaluator drift(g, payoff, params);
  const int n = g.size();
  const auto bound = drift.drift_magnitude_bound();
  std::vector<double> box(n);
  for (int i = 0; i < n; ++i) box[i] = bound[i] / params.psi[i];

  std::vector<std::vector<double>> starts;
  {
    std::vector<double> all_c(n);
    for (int i = 0; i < n; ++i) all_c[i] = -1.5 * box[i];
    starts.push_back(all_c);  // strongly efficient-favoring
    CounterRng rng(seed);
    for (int s = 1; s < sample_starts; ++s) {
      std::vector<double> q(n);
      for (int i = 0; i < n; ++i) q[i] = rng.uniform(-box[i], box[i]);
      starts.push_back(std::move(q));
    }
  }

  AbsorptionReport report;
  report.endpoints = static_cast<int>(starts.size());
  std::vector<char> positive(starts.size(), 0);
  std::vector<std::vector<double>> finals(starts.size());
#pragma omp parallel for schedule(dynamic)
  for (int s = 0; s < static_cast<int>(starts.size()); ++s) {
    const Trajectory traj = integrate(starts[s], g, payoff, params, integ);
    finals[s] = traj.final_q();
    bool pos = traj.status == TerminalStatus::Converged;
    for (double v : finals[s]) pos = pos && v > 0;
    positive[s] = pos;
  }
  report.all_risk_dominant = true;
  for (std::size_t s = 0; s < starts.size(); ++s) {
    if (!positive[s]) {
      report.all_risk_dominant = false;
      ++report.failures;
      report.failing_endpoints.push_back(finals[s]);
    }
  }
  return report;
}

std::string census_csv(const BECensus& census) {
  std::ostringstream os;
  os.precision(17);
  const int n = census.records.empty() ? 0 : static_cast<int>(census.records[0].q_star.size());
  os << "root_id,stable,residual";
  for (int i = 0; i < n; ++i) os << ",q_" << i;
  for (int i = 0; i < n; ++i) os << ",p_" << i;
  os << ",max_re_eigenvalue\n";
  for (std::size_t r = 0; r < census.records.size(); ++r) {
    const auto& rec = census.records[r];
    os << r << ',' << (rec.stable ? 1 : 0) << ',' << rec.residual;
    for (double v : rec.q_star) os << ',' << v;
    for (double v : rec.p_star) os << ',' << v;
    os << ',' << rec.max_re_eigenvalue << '\n';
  }
  return os.str();
}

}  // namespace ewanet
