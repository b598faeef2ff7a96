#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "ewanet/graph.hpp"
#include "ewanet/payoff.hpp"

namespace ewanet {

// Per-agent accuracy schedule. The default family is
//   lambda_i(t) = lambda_inf_i * t / (t + timescale_i),
// monotone nondecreasing in t. Arbitrary tabulated schedules (piecewise
// linear over a shared time grid) are accepted as well and validated for
// monotonicity at the given points.
struct LambdaSchedule {
  std::vector<double> lambda_inf;  // family form (empty when tabulated)
  std::vector<double> timescale;

  std::vector<double> times;                   // tabulated form
  std::vector<std::vector<double>> values;     // values[k][i] at times[k]

  bool tabulated() const { return !times.empty(); }
  void eval(double t, std::span<double> out) const;
  double max_value() const;
  void validate(int n) const;
};

struct BehavioralParams {
  std::vector<double> psi;     // depreciation, > 0
  std::vector<double> lambda;  // decision accuracy, > 0
  std::vector<double> eta;     // forgone-payoff weight, in [0,1]
  std::optional<LambdaSchedule> lambda_schedule;
  std::optional<LambdaSchedule> psi_schedule;   // accepted, no stock test relies on it
  std::optional<std::vector<double>> gamma;     // risk-loving exponents
  std::optional<double> pi_floor;               // must sit below every payoff
  std::optional<std::vector<double>> aspiration;

  static BehavioralParams uniform(int n, double psi, double lambda, double eta);
  void validate(int n, const PayoffMatrix& payoff) const;
};

struct AttractionState {
  std::vector<double> q;
  double t = 0;
};

enum class TerminalStatus { Converged, HorizonReached, Diverged };

struct Trajectory {
  std::vector<AttractionState> samples;  // strictly increasing timestamps
  TerminalStatus status = TerminalStatus::HorizonReached;
  double final_residual = 0;  // |F(q_final)|_inf

  const std::vector<double>& final_q() const { return samples.back().q; }
  double final_t() const { return samples.back().t; }
};

struct IntegratorOptions {
  double horizon = 1e4;
  double dt = 0;            // <= 0: 0.01 / max(psi_i, lambda_i * payoff scale)
  double conv_tol = 1e-9;   // |F|_inf, sustained over conv_streak samples
  int conv_streak = 10;
  int sample_every = 0;     // 0: thin to roughly 2000 kept samples
  double divergence_limit = 1e12;
};

// Overflow-safe logistic response 1 / (1 + exp(-lambda q)).
double logit_response(double q, double lambda);

// Scratch buffers so repeated drift evaluations stay allocation-free.
struct DriftWorkspace {
  std::vector<double> p, nbr_sum, lam, psi;
};

// Right-hand side of the attraction-difference ODE, compiled once per
// (graph, payoff, params). The 6.2 transform and aspiration shifts are folded
// into per-agent effective payoff entries at construction.
class DriftEvaluator {
 public:
  DriftEvaluator(const Graph& g, const PayoffMatrix& payoff, const BehavioralParams& params);

  int size() const { return n_; }
  const Graph& graph() const { return *g_; }
  const BehavioralParams& params() const { return params_; }

  void lambdas_at(double t, std::span<double> out) const;
  void psis_at(double t, std::span<double> out) const;
  void probabilities(std::span<const double> q, double t, std::span<double> p) const;
  void eval(std::span<const double> q, double t, std::span<double> f, DriftWorkspace& ws) const;
  std::vector<double> operator()(const std::vector<double>& q, double t = 0) const;

  // Analytic Jacobian of F at q; off-diagonal couplings are nonnegative
  // under the coordination assumptions.
  Eigen::MatrixXd jacobian(std::span<const double> q, double t = 0) const;
  void jacobian_into(std::span<const double> q, double t, Eigen::MatrixXd& J,
                     DriftWorkspace& ws) const;

  double suggested_dt() const;
  // Per-agent magnitude bound: |q_i| can never leave
  // max(|q_i(0)|, bound_i / psi_i) going forward.
  std::vector<double> drift_magnitude_bound() const;

  struct AgentPayoff {
    double z, y, x, w;
  };
  const AgentPayoff& agent_payoff(int i) const { return pay_[i]; }

 private:
  const Graph* g_;
  BehavioralParams params_;
  std::vector<AgentPayoff> pay_;
  int n_;
};

// Spec-level free functions over the evaluator.
std::vector<double> drift_q(const std::vector<double>& q, const Graph& g,
                            const PayoffMatrix& payoff, const BehavioralParams& params,
                            double t = 0);

// Two-track attraction ODE (the pair (a1, a0) with common depreciation);
// kept as an independent oracle against drift_q.
std::pair<std::vector<double>, std::vector<double>> drift_full(
    const std::vector<double>& a1, const std::vector<double>& a0, const Graph& g,
    const PayoffMatrix& payoff, const BehavioralParams& params, double t = 0);

// Frequency-space form of the same dynamics; test oracle for the logit map.
std::vector<double> drift_p(const std::vector<double>& p, const Graph& g,
                            const PayoffMatrix& payoff, const BehavioralParams& params,
                            double t = 0);

Trajectory integrate(const std::vector<double>& q0, const Graph& g, const PayoffMatrix& payoff,
                     const BehavioralParams& params, const IntegratorOptions& opt = {});

// Integrates the two-track system; returns (a1, a0) at the horizon.
std::pair<std::vector<double>, std::vector<double>> integrate_attractions(
    const std::vector<double>& a1_0, const std::vector<double>& a0_0, const Graph& g,
    const PayoffMatrix& payoff, const BehavioralParams& params, double horizon, double dt);

// True iff all off-diagonal partials of F are >= 0 at q.
bool cooperativity_check(const std::vector<double>& q, const Graph& g, const PayoffMatrix& payoff,
                         const BehavioralParams& params, double t = 0);

// (pi - pi_floor)^gamma entrywise; pi_floor must sit strictly below every
// payoff. gamma = 1 with pi_floor = 0 is the identity on positive payoffs.
PayoffMatrix transform_payoff(const PayoffMatrix& payoff, double gamma, double pi_floor);
// pi - aspiration entrywise (uniform aspiration is a parallel shift).
PayoffMatrix shift_payoff(const PayoffMatrix& payoff, double aspiration);

std::string trajectory_csv(const Trajectory& traj, bool with_probabilities = false,
                           const BehavioralParams* params = nullptr);

}  // namespace ewanet
