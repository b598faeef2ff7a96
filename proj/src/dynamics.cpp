#include "ewanet/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace ewanet {

namespace {

std::vector<DriftEvaluator::AgentPayoff> effective_agent_payoffs(const PayoffMatrix& payoff,
                                                                 const BehavioralParams& params,
                                                                 int n) {
  std::vector<DriftEvaluator::AgentPayoff> pay(n, {payoff.z, payoff.y, payoff.x, payoff.w});
  if (params.gamma) {
    const double floor = *params.pi_floor;
    for (int i = 0; i < n; ++i) {
      const double gi = (*params.gamma)[i];
      pay[i] = {std::pow(payoff.z - floor, gi), std::pow(payoff.y - floor, gi),
                std::pow(payoff.x - floor, gi), std::pow(payoff.w - floor, gi)};
    }
  } else if (params.aspiration) {
    for (int i = 0; i < n; ++i) {
      const double u = (*params.aspiration)[i];
      pay[i] = {payoff.z - u, payoff.y - u, payoff.x - u, payoff.w - u};
    }
  }
  return pay;
}

void require(bool cond, const std::string& what) {
  if (!cond) throw std::invalid_argument(what);
}

}  // namespace

void LambdaSchedule::eval(double t, std::span<double> out) const {
  if (tabulated()) {
    const int n = static_cast<int>(values.front().size());
    if (t <= times.front()) {
      for (int i = 0; i < n; ++i) out[i] = values.front()[i];
      return;
    }
    if (t >= times.back()) {
      for (int i = 0; i < n; ++i) out[i] = values.back()[i];
      return;
    }
    const auto it = std::upper_bound(times.begin(), times.end(), t);
    const std::size_t k = static_cast<std::size_t>(it - times.begin());
    const double w = (t - times[k - 1]) / (times[k] - times[k - 1]);
    for (int i = 0; i < n; ++i)
      out[i] = values[k - 1][i] + w * (values[k][i] - values[k - 1][i]);
    return;
  }
  for (std::size_t i = 0; i < lambda_inf.size(); ++i)
    out[i] = lambda_inf[i] * t / (t + timescale[i]);
}

double LambdaSchedule::max_value() const {
  double m = 0;
  if (tabulated()) {
    for (const auto& row : values)
      for (double v : row) m = std::max(m, v);
  } else {
    for (double v : lambda_inf) m = std::max(m, v);
  }
  return m;
}

void LambdaSchedule::validate(int n) const {
  if (tabulated()) {
    require(values.size() == times.size(), "schedule: times/values size mismatch");
    for (std::size_t k = 0; k + 1 < times.size(); ++k)
      require(times[k] < times[k + 1], "schedule: times must be strictly increasing");
    for (const auto& row : values)
      require(static_cast<int>(row.size()) == n, "schedule: row length mismatch");
    for (int i = 0; i < n; ++i)
      for (std::size_t k = 0; k + 1 < values.size(); ++k)
        require(values[k][i] <= values[k + 1][i],
                "schedule: values must be nondecreasing in t");
  } else {
    require(static_cast<int>(lambda_inf.size()) == n &&
                static_cast<int>(timescale.size()) == n,
            "schedule: parameter length mismatch");
    for (int i = 0; i < n; ++i)
      require(lambda_inf[i] > 0 && timescale[i] > 0, "schedule: parameters must be positive");
  }
}

BehavioralParams BehavioralParams::uniform(int n, double psi, double lambda, double eta) {
  BehavioralParams p;
  p.psi.assign(n, psi);
  p.lambda.assign(n, lambda);
  p.eta.assign(n, eta);
  return p;
}

void BehavioralParams::validate(int n, const PayoffMatrix& payoff) const {
  require(static_cast<int>(psi.size()) == n, "params: psi length mismatch");
  require(static_cast<int>(eta.size()) == n, "params: eta length mismatch");
  if (!psi_schedule)
    for (double v : psi) require(v > 0, "params: psi must be positive");
  if (!lambda_schedule) {
    require(static_cast<int>(lambda.size()) == n, "params: lambda length mismatch");
    for (double v : lambda) require(v > 0, "params: lambda must be positive");
  }
  for (double v : eta) require(v >= 0 && v <= 1, "params: eta must lie in [0,1]");
  if (lambda_schedule) lambda_schedule->validate(n);
  if (psi_schedule) psi_schedule->validate(n);
  require(!(gamma && aspiration), "params: gamma transform and aspiration are exclusive");
  if (gamma) {
    require(static_cast<int>(gamma->size()) == n, "params: gamma length mismatch");
    require(pi_floor.has_value(), "params: gamma transform needs pi_floor");
    const double lo = std::min({payoff.z, payoff.y, payoff.x, payoff.w});
    require(*pi_floor < lo, "params: pi_floor must sit strictly below every payoff");
    for (double v : *gamma) require(v > 0, "params: gamma must be positive");
  }
  if (aspiration)
    require(static_cast<int>(aspiration->size()) == n, "params: aspiration length mismatch");
}

double logit_response(double q, double lambda) {
  const double a = lambda * q;
  if (a >= 0) {
    const double e = std::exp(-a);
    return 1.0 / (1.0 + e);
  }
  const double e = std::exp(a);
  return e / (1.0 + e);
}

DriftEvaluator::DriftEvaluator(const Graph& g, const PayoffMatrix& payoff,
                               const BehavioralParams& params)
    : g_(&g), params_(params), n_(g.size()) {
  params_.validate(n_, payoff);
  pay_ = effective_agent_payoffs(payoff, params_, n_);
}

void DriftEvaluator::lambdas_at(double t, std::span<double> out) const {
  if (params_.lambda_schedule) {
    params_.lambda_schedule->eval(t, out);
  } else {
    for (int i = 0; i < n_; ++i) out[i] = params_.lambda[i];
  }
}

void DriftEvaluator::psis_at(double t, std::span<double> out) const {
  if (params_.psi_schedule) {
    params_.psi_schedule->eval(t, out);
  } else {
    for (int i = 0; i < n_; ++i) out[i] = params_.psi[i];
  }
}

void DriftEvaluator::probabilities(std::span<const double> q, double t,
                                   std::span<double> p) const {
  std::vector<double> lam(n_);
  lambdas_at(t, lam);
  for (int i = 0; i < n_; ++i) p[i] = logit_response(q[i], lam[i]);
}

void DriftEvaluator::eval(std::span<const double> q, double t, std::span<double> f,
                          DriftWorkspace& ws) const {
  ws.p.resize(n_);
  ws.nbr_sum.resize(n_);
  ws.lam.resize(n_);
  ws.psi.resize(n_);
  lambdas_at(t, ws.lam);
  psis_at(t, ws.psi);
  for (int i = 0; i < n_; ++i) ws.p[i] = logit_response(q[i], ws.lam[i]);
  for (int i = 0; i < n_; ++i) {
    double s = 0;
    for (int j : g_->neighbors(i)) s += ws.p[j];
    ws.nbr_sum[i] = s;
  }
  for (int i = 0; i < n_; ++i) {
    const auto& pe = pay_[i];
    const double d = static_cast<double>(g_->degree(i));
    const double s1 = (pe.w - pe.x) * ws.nbr_sum[i] + pe.x * d;
    const double s0 = (pe.y - pe.z) * ws.nbr_sum[i] + pe.z * d;
    const double pi = ws.p[i];
    const double tau1 = pi + params_.eta[i] * (1.0 - pi);
    const double tau0 = 1.0 - pi + params_.eta[i] * pi;
    f[i] = -ws.psi[i] * q[i] + tau1 * s1 - tau0 * s0;
  }
}

std::vector<double> DriftEvaluator::operator()(const std::vector<double>& q, double t) const {
  DriftWorkspace ws;
  std::vector<double> f(n_);
  eval(q, t, f, ws);
  return f;
}

Eigen::MatrixXd DriftEvaluator::jacobian(std::span<const double> q, double t) const {
  DriftWorkspace ws;
  Eigen::MatrixXd J;
  jacobian_into(q, t, J, ws);
  return J;
}

void DriftEvaluator::jacobian_into(std::span<const double> q, double t, Eigen::MatrixXd& J,
                                   DriftWorkspace& ws) const {
  std::vector<double> f(n_);
  eval(q, t, f, ws);  // fills p, nbr_sum, lam, psi
  J.setZero(n_, n_);
  for (int i = 0; i < n_; ++i) {
    const auto& pe = pay_[i];
    const double d = static_cast<double>(g_->degree(i));
    const double s1 = (pe.w - pe.x) * ws.nbr_sum[i] + pe.x * d;
    const double s0 = (pe.y - pe.z) * ws.nbr_sum[i] + pe.z * d;
    const double pi = ws.p[i];
    const double dpi = ws.lam[i] * pi * (1.0 - pi);
    J(i, i) = -ws.psi[i] + (1.0 - params_.eta[i]) * dpi * (s1 + s0);
    const double tau1 = pi + params_.eta[i] * (1.0 - pi);
    const double tau0 = 1.0 - pi + params_.eta[i] * pi;
    const double coupling = tau1 * (pe.w - pe.x) + tau0 * (pe.z - pe.y);
    for (int j : g_->neighbors(i)) {
      const double dpj = ws.lam[j] * ws.p[j] * (1.0 - ws.p[j]);
      J(i, j) = dpj * coupling;
    }
  }
}

double DriftEvaluator::suggested_dt() const {
  double psi_max = 0;
  for (double v : params_.psi) psi_max = std::max(psi_max, v);
  if (params_.psi_schedule) psi_max = std::max(psi_max, params_.psi_schedule->max_value());
  double lam_max = 0;
  if (params_.lambda_schedule) {
    lam_max = params_.lambda_schedule->max_value();
  } else {
    for (double v : params_.lambda) lam_max = std::max(lam_max, v);
  }
  double scale = 0;
  for (const auto& pe : pay_)
    scale = std::max({scale, std::abs(pe.z), std::abs(pe.y), std::abs(pe.x), std::abs(pe.w)});
  const double rate = std::max({psi_max, lam_max * scale, 1e-6});
  return 0.01 / rate;
}

std::vector<double> DriftEvaluator::drift_magnitude_bound() const {
  std::vector<double> bound(n_);
  for (int i = 0; i < n_; ++i) {
    const auto& pe = pay_[i];
    const double row = std::max(std::abs(pe.w), std::abs(pe.x)) +
                       std::max(std::abs(pe.y), std::abs(pe.z));
    bound[i] = g_->degree(i) * row;
  }
  return bound;
}

std::vector<double> drift_q(const std::vector<double>& q, const Graph& g,
                            const PayoffMatrix& payoff, const BehavioralParams& params,
                            double t) {
  return DriftEvaluator(g, payoff, params)(q, t);
}

std::pair<std::vector<double>, std::vector<double>> drift_full(
    const std::vector<double>& a1, const std::vector<double>& a0, const Graph& g,
    const PayoffMatrix& payoff, const BehavioralParams& params, double t) {
  const int n = g.size();
  params.validate(n, payoff);
  const auto pay = effective_agent_payoffs(payoff, params, n);
  std::vector<double> lam(n), psi(n);
  if (params.lambda_schedule) {
    params.lambda_schedule->eval(t, lam);
  } else {
    lam = params.lambda;
  }
  if (params.psi_schedule) {
    params.psi_schedule->eval(t, psi);
  } else {
    psi = params.psi;
  }
  std::vector<double> p(n);
  for (int i = 0; i < n; ++i) p[i] = logit_response(a1[i] - a0[i], lam[i]);
  std::vector<double> da1(n), da0(n);
  for (int i = 0; i < n; ++i) {
    double sum1 = 0, sum0 = 0;
    for (int j : g.neighbors(i)) {
      sum1 += p[j] * pay[i].w + (1.0 - p[j]) * pay[i].x;
      sum0 += p[j] * pay[i].y + (1.0 - p[j]) * pay[i].z;
    }
    da1[i] = -psi[i] * a1[i] + (p[i] + params.eta[i] * (1.0 - p[i])) * sum1;
    da0[i] = -psi[i] * a0[i] + (1.0 - p[i] + params.eta[i] * p[i]) * sum0;
  }
  return {da1, da0};
}

std::vector<double> drift_p(const std::vector<double>& p, const Graph& g,
                            const PayoffMatrix& payoff, const BehavioralParams& params,
                            double t) {
  const int n = g.size();
  params.validate(n, payoff);
  const auto pay = effective_agent_payoffs(payoff, params, n);
  std::vector<double> lam(n), psi(n);
  if (params.lambda_schedule) {
    params.lambda_schedule->eval(t, lam);
  } else {
    lam = params.lambda;
  }
  if (params.psi_schedule) {
    params.psi_schedule->eval(t, psi);
  } else {
    psi = params.psi;
  }
  std::vector<double> dp(n);
  for (int i = 0; i < n; ++i) {
    double u1 = 0, u0 = 0;
    for (int j : g.neighbors(i)) {
      u1 += p[j] * pay[i].w + (1.0 - p[j]) * pay[i].x;
      u0 += p[j] * pay[i].y + (1.0 - p[j]) * pay[i].z;
    }
    const double tau1 = p[i] + params.eta[i] * (1.0 - p[i]);
    const double tau0 = 1.0 - p[i] + params.eta[i] * p[i];
    dp[i] = p[i] * (1.0 - p[i]) *
            (psi[i] * std::log(1.0 / p[i] - 1.0) + lam[i] * tau1 * u1 - lam[i] * tau0 * u0);
  }
  return dp;
}

namespace {

bool finite_and_bounded(const std::vector<double>& q, double limit) {
  for (double v : q) {
    if (!std::isfinite(v) || std::abs(v) > limit) return false;
  }
  return true;
}

}  // namespace

Trajectory integrate(const std::vector<double>& q0, const Graph& g, const PayoffMatrix& payoff,
                     const BehavioralParams& params, const IntegratorOptions& opt) {
  if (static_cast<int>(q0.size()) != g.size())
    throw std::invalid_argument("integrate: q0 length mismatch");
  if (opt.horizon <= 0) throw std::invalid_argument("integrate: horizon must be positive");
  const DriftEvaluator drift(g, payoff, params);
  const double dt = opt.dt > 0 ? opt.dt : drift.suggested_dt();
  const long steps = static_cast<long>(std::ceil(opt.horizon / dt));
  const long thin = opt.sample_every > 0 ? opt.sample_every : std::max(1L, steps / 2000);

  const int n = g.size();
  DriftWorkspace ws;
  std::vector<double> q = q0, k1(n), k2(n), k3(n), k4(n), tmp(n), prev(n);

  Trajectory traj;
  traj.samples.push_back({q, 0.0});
  int streak = 0;
  double t = 0;

  for (long step = 0; step < steps; ++step) {
    drift.eval(q, t, k1, ws);
    double resid = 0;
    for (double v : k1) resid = std::max(resid, std::abs(v));
    traj.final_residual = resid;
    if (resid <= opt.conv_tol) {
      if (++streak >= opt.conv_streak) {
        traj.status = TerminalStatus::Converged;
        break;
      }
    } else {
      streak = 0;
    }

    prev = q;
    for (int i = 0; i < n; ++i) tmp[i] = q[i] + 0.5 * dt * k1[i];
    drift.eval(tmp, t + 0.5 * dt, k2, ws);
    for (int i = 0; i < n; ++i) tmp[i] = q[i] + 0.5 * dt * k2[i];
    drift.eval(tmp, t + 0.5 * dt, k3, ws);
    for (int i = 0; i < n; ++i) tmp[i] = q[i] + dt * k3[i];
    drift.eval(tmp, t + dt, k4, ws);
    for (int i = 0; i < n; ++i)
      q[i] += dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    t += dt;

    if (!finite_and_bounded(q, opt.divergence_limit)) {
      q = prev;  // last finite state, one step back
      t -= dt;
      traj.status = TerminalStatus::Diverged;
      break;
    }
    if ((step + 1) % thin == 0 && t > traj.samples.back().t)
      traj.samples.push_back({q, t});
  }

  if (t > traj.samples.back().t) traj.samples.push_back({q, t});
  {
    std::vector<double> f(n);
    drift.eval(traj.samples.back().q, traj.samples.back().t, f, ws);
    double resid = 0;
    for (double v : f) resid = std::max(resid, std::abs(v));
    traj.final_residual = resid;
  }
  return traj;
}

std::pair<std::vector<double>, std::vector<double>> integrate_attractions(
    const std::vector<double>& a1_0, const std::vector<double>& a0_0, const Graph& g,
    const PayoffMatrix& payoff, const BehavioralParams& params, double horizon, double dt) {
  const int n = g.size();
  std::vector<double> a1 = a1_0, a0 = a0_0;
  auto rhs = [&](const std::vector<double>& x1, const std::vector<double>& x0, double t) {
    return drift_full(x1, x0, g, payoff, params, t);
  };
  const long steps = static_cast<long>(std::ceil(horizon / dt));
  std::vector<double> t1(n), t0(n);
  for (long step = 0; step < steps; ++step) {
    const double t = step * dt;
    const auto [k1a, k1b] = rhs(a1, a0, t);
    for (int i = 0; i < n; ++i) {
      t1[i] = a1[i] + 0.5 * dt * k1a[i];
      t0[i] = a0[i] + 0.5 * dt * k1b[i];
    }
    const auto [k2a, k2b] = rhs(t1, t0, t + 0.5 * dt);
    for (int i = 0; i < n; ++i) {
      t1[i] = a1[i] + 0.5 * dt * k2a[i];
      t0[i] = a0[i] + 0.5 * dt * k2b[i];
    }
    const auto [k3a, k3b] = rhs(t1, t0, t + 0.5 * dt);
    for (int i = 0; i < n; ++i) {
      t1[i] = a1[i] + dt * k3a[i];
      t0[i] = a0[i] + dt * k3b[i];
    }
    const auto [k4a, k4b] = rhs(t1, t0, t + dt);
    for (int i = 0; i < n; ++i) {
      a1[i] += dt / 6.0 * (k1a[i] + 2 * k2a[i] + 2 * k3a[i] + k4a[i]);
      a0[i] += dt / 6.0 * (k1b[i] + 2 * k2b[i] + 2 * k3b[i] + k4b[i]);
    }
  }
  return {a1, a0};
}

bool cooperativity_check(const std::vector<double>& q, const Graph& g, const PayoffMatrix& payoff,
                         const BehavioralParams& params, double t) {
  const DriftEvaluator drift(g, payoff, params);
  const Eigen::MatrixXd J = drift.jacobian(q, t);
  for (int i = 0; i < g.size(); ++i)
    for (int j : g.neighbors(i))
      if (J(i, j) < 0) return false;
  return true;
}

PayoffMatrix transform_payoff(const PayoffMatrix& payoff, double gamma, double pi_floor) {
  const double lo = std::min({payoff.z, payoff.y, payoff.x, payoff.w});
  if (pi_floor >= lo)
    throw std::invalid_argument("transform_payoff: pi_floor must be below the lowest payoff");
  return PayoffMatrix::make(std::pow(payoff.z - pi_floor, gamma),
                            std::pow(payoff.y - pi_floor, gamma),
                            std::pow(payoff.x - pi_floor, gamma),
                            std::pow(payoff.w - pi_floor, gamma));
}

PayoffMatrix shift_payoff(const PayoffMatrix& payoff, double aspiration) {
  return PayoffMatrix::make(payoff.z - aspiration, payoff.y - aspiration,
                            payoff.x - aspiration, payoff.w - aspiration);
}

std::string trajectory_csv(const Trajectory& traj, bool with_probabilities,
                           const BehavioralParams* params) {
  std::ostringstream os;
  os.precision(17);
  const int n = traj.samples.empty() ? 0 : static_cast<int>(traj.samples.front().q.size());
  os << 't';
  for (int i = 0; i < n; ++i) os << ",q_" << i;
  if (with_probabilities)
    for (int i = 0; i < n; ++i) os << ",p_" << i;
  os << '\n';
  std::vector<double> lam(n);
  for (const auto& s : traj.samples) {
    os << s.t;
    for (double v : s.q) os << ',' << v;
    if (with_probabilities && params) {
      if (params->lambda_schedule) {
        params->lambda_schedule->eval(s.t, lam);
      } else {
        lam = params->lambda;
      }
      for (int i = 0; i < n; ++i) os << ',' << logit_response(s.q[i], lam[i]);
    }
    os << '\n';
  }
  return os.str();
}

}  // namespace ewanet
