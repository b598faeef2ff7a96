#include "ewanet/scenarios.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace ewanet {

VectorFieldGrid vector_field(const Graph& g, const PayoffMatrix& payoff,
                             const BehavioralParams& params, double lo, double hi,
                             int resolution) {
  if (g.size() != 2) throw std::invalid_argument("vector_field: needs a two-agent graph");
  if (resolution < 2) throw std::invalid_argument("vector_field: resolution too small");
  const DriftEvaluator drift(g, payoff, params);
  VectorFieldGrid grid;
  grid.lo = lo;
  grid.hi = hi;
  grid.resolution = resolution;
  const int m = resolution + 1;
  const double step = (hi - lo) / resolution;
  std::vector<double> f0(m * m), f1(m * m);
  DriftWorkspace ws;
  std::vector<double> f(2);
  for (int a = 0; a < m; ++a) {
    for (int b = 0; b < m; ++b) {
      const std::vector<double> q{lo + a * step, lo + b * step};
      drift.eval(q, 0.0, f, ws);
      f0[a * m + b] = f[0];
      f1[a * m + b] = f[1];
      grid.rows.push_back({q[0], q[1], f[0], f[1]});
    }
  }

  // Cells where both isoclines change sign across the corners.
  std::vector<char> candidate(resolution * resolution, 0);
  auto crosses = [&](const std::vector<double>& v, int a, int b) {
    const double c00 = v[a * m + b], c01 = v[a * m + b + 1];
    const double c10 = v[(a + 1) * m + b], c11 = v[(a + 1) * m + b + 1];
    const double mn = std::min({c00, c01, c10, c11});
    const double mx = std::max({c00, c01, c10, c11});
    return mn <= 0 && mx >= 0;
  };
  for (int a = 0; a < resolution; ++a)
    for (int b = 0; b < resolution; ++b)
      candidate[a * resolution + b] = crosses(f0, a, b) && crosses(f1, a, b);

  // Polish each candidate cell with a short Newton run on the 2x2 system and
  // deduplicate the landing points; near-tangent cells either fail to
  // converge or collapse into a true intersection.
  for (int a = 0; a < resolution; ++a) {
    for (int b = 0; b < resolution; ++b) {
      if (!candidate[a * resolution + b]) continue;
      std::vector<double> q{lo + (a + 0.5) * step, lo + (b + 0.5) * step};
      bool converged = false;
      for (int iter = 0; iter < 40; ++iter) {
        drift.eval(q, 0.0, f, ws);
        if (std::max(std::abs(f[0]), std::abs(f[1])) <= 1e-10) {
          converged = true;
          break;
        }
        const Eigen::MatrixXd J = drift.jacobian(q, 0.0);
        const double det = J(0, 0) * J(1, 1) - J(0, 1) * J(1, 0);
        if (std::abs(det) < 1e-14) break;
        const double dq0 = (-f[0] * J(1, 1) + f[1] * J(0, 1)) / det;
        const double dq1 = (-f[1] * J(0, 0) + f[0] * J(1, 0)) / det;
        q[0] += dq0;
        q[1] += dq1;
        if (std::abs(q[0]) > 10 * (std::abs(hi) + std::abs(lo)) || !std::isfinite(q[0]) ||
            !std::isfinite(q[1]))
          break;
      }
      if (!converged || q[0] < lo || q[0] > hi || q[1] < lo || q[1] > hi) continue;
      bool dup = false;
      for (const auto& [x, y] : grid.intersection_cells)
        dup = dup || (std::abs(x - q[0]) <= step && std::abs(y - q[1]) <= step);
      if (!dup) grid.intersection_cells.emplace_back(q[0], q[1]);
    }
  }
  grid.intersections = static_cast<int>(grid.intersection_cells.size());
  return grid;
}

std::string vector_field_csv(const VectorFieldGrid& grid) {
  std::ostringstream os;
  os.precision(12);
  os << "q_0,q_1,f_0,f_1\n";
  for (const auto& r : grid.rows)
    os << r.q0 << ',' << r.q1 << ',' << r.f0 << ',' << r.f1 << '\n';
  return os.str();
}

CascadeTranscript cascade_scenario(const Graph& g, const PayoffMatrix& payoff,
                                   const std::vector<std::uint8_t>& initial_d,
                                   const CascadeSpec& spec) {
  if (static_cast<int>(initial_d.size()) != g.size())
    throw std::invalid_argument("cascade_scenario: partition length mismatch");
  if (!validate(payoff).assumption4)
    throw std::invalid_argument("cascade_scenario: payoff lacks the risk/efficiency conflict");
  const int n = g.size();
  std::vector<std::uint8_t> favors = initial_d;
  std::vector<double> q(n);
  for (int i = 0; i < n; ++i) q[i] = favors[i] ? spec.q_mag : -spec.q_mag;

  CascadeTranscript out;
  auto snapshot = [&](int stage) {
    CascadeStage s;
    s.stage = stage;
    s.d_count = 0;
    s.partition.resize(n, '0');
    for (int i = 0; i < n; ++i) {
      if (favors[i]) {
        s.partition[i] = '1';
        ++s.d_count;
      }
    }
    out.stages.push_back(s);
  };
  snapshot(0);

  for (int stage = 1; stage <= spec.max_stages; ++stage) {
    const int d_before =
        static_cast<int>(std::count(favors.begin(), favors.end(), std::uint8_t{1}));
    if (d_before == 0) break;

    BehavioralParams params;
    params.psi.resize(n);
    params.lambda.resize(n);
    params.eta.assign(n, spec.eta);
    for (int i = 0; i < n; ++i) {
      params.psi[i] = favors[i] ? spec.psi_malleable : spec.psi_stubborn;
      params.lambda[i] = favors[i] ? spec.lambda_malleable : spec.lambda_stubborn;
    }
    IntegratorOptions opt;
    opt.horizon = spec.stage_horizon;
    opt.conv_tol = 0;  // run the whole stage
    opt.dt = spec.dt;
    const Trajectory traj = integrate(q, g, payoff, params, opt);
    q = traj.final_q();

    std::vector<std::uint8_t> next(n);
    for (int i = 0; i < n; ++i) next[i] = q[i] > 0;
    const bool changed = next != favors;
    favors = next;
    snapshot(stage);
    if (!changed) {
      out.stalled = true;
      break;
    }
  }

  out.full_cascade = std::all_of(q.begin(), q.end(), [](double v) { return v < 0; });
  out.final_partition = out.stages.back().partition;
  return out;
}

std::string cascade_csv(const CascadeTranscript& t) {
  std::ostringstream os;
  os << "stage,d_count,partition\n";
  for (const auto& s : t.stages) os << s.stage << ',' << s.d_count << ',' << s.partition << '\n';
  os << "\nfull_cascade,stalled\n" << (t.full_cascade ? 1 : 0) << ',' << (t.stalled ? 1 : 0)
     << '\n';
  return os.str();
}

ReinforceBestResult reinforce_best_scenario(const Graph& g, const PayoffMatrix& payoff,
                                            const BehavioralParams& params,
                                            const std::vector<double>& gamma_grid,
                                            double pi_floor, double horizon) {
  if (!validate(payoff).assumption4)
    throw std::invalid_argument(
        "reinforce_best_scenario: payoff lacks the risk/efficiency conflict");
  ReinforceBestResult out;
  const int n = g.size();
  const std::vector<double> q0(n, 0.0);
  for (double gamma : gamma_grid) {
    const PayoffMatrix transformed = transform_payoff(payoff, gamma, pi_floor);
    IntegratorOptions opt;
    opt.horizon = horizon;
    opt.conv_tol = 1e-9;
    const Trajectory traj = integrate(q0, g, transformed, params, opt);
    ReinforceBestRow row;
    row.gamma = gamma;
    const auto& qf = traj.final_q();
    const bool all_pos = std::all_of(qf.begin(), qf.end(), [](double v) { return v > 1e-9; });
    const bool all_neg = std::all_of(qf.begin(), qf.end(), [](double v) { return v < -1e-9; });
    row.outcome = all_pos ? 1 : all_neg ? -1 : 0;
    out.rows.push_back(row);
    if (row.outcome == -1 && !out.found) {
      out.found = true;
      out.gamma_hat = gamma;
    }
  }
  return out;
}

std::string reinforce_best_csv(const ReinforceBestResult& r) {
  std::ostringstream os;
  os.precision(12);
  os << "gamma,outcome\n";
  for (const auto& row : r.rows) os << row.gamma << ',' << row.outcome << '\n';
  os << "\ngamma_hat,found\n" << r.gamma_hat << ',' << (r.found ? 1 : 0) << '\n';
  return os.str();
}

}  // namespace ewanet
