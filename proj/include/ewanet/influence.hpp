#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "ewanet/dynamics.hpp"
#include "ewanet/graph.hpp"
#include "ewanet/payoff.hpp"

namespace ewanet {

// Jacobian at the neutral state q = 0 for a symmetric-choice game (h, l):
//   J_ii = -psi_i + (1 - eta_i) d_i (h + l) lambda_i / 4
//   J_ij = G_ij (1 + eta_i) (h - l) lambda_j / 4
Eigen::MatrixXd neutral_jacobian(const Graph& g, const PayoffMatrix& payoff_symmetric,
                                 const BehavioralParams& params);

struct InfluenceReport {
  double kappa1 = 0;                       // largest-real-part eigenvalue
  std::vector<double> v1;                  // right eigenvector, positive orientation, L2 = 1
  std::vector<double> xi;                  // left eigenvector, L1-normalized to sum 1
  std::vector<double> subdominant;         // remaining real spectrum when available
  bool full_spectrum_available = false;
  bool unstable = false;                   // kappa1 > 0
  bool all_positive_v1 = false;
  double residual_right = 0, residual_left = 0;
};

struct InfluenceOptions {
  double tol = 1e-11;         // |J v - kappa v|_inf target
  int max_iter = 200000;
  int full_spectrum_cap = 50; // deflation attempted only when n <= cap
  double eigen_gap_min = 1e-8;
};

// Dominant eigenpairs of the neutral Jacobian and its transpose by shifted
// power iteration. The shift max|J_ii| + max off-diagonal row sum makes the
// iteration matrix nonnegative with positive diagonal, so the largest-real-
// part eigenvalue is the strictly dominant one (Perron).
InfluenceReport influence_report(const Graph& g, const PayoffMatrix& payoff_symmetric,
                                 const BehavioralParams& params,
                                 const InfluenceOptions& opt = {});

bool neutral_stability(const InfluenceReport& report);  // kappa1 < 0

enum class CoordinationPrediction { D, C, Indeterminate };
std::string to_string(CoordinationPrediction p);

// Sign of xi . q0. Requires an unstable neutral state with an all-positive
// first right eigenvector; refuses otherwise.
CoordinationPrediction predict_coordination(const InfluenceReport& report,
                                            const std::vector<double>& q0);

// Full eigendecomposition of the neutral Jacobian by repeated power iteration
// with Wielandt deflation. complete = false means only the principal pair is
// trustworthy (complex or clustered subdominant spectrum).
struct EigenDecomposition {
  std::vector<double> eigenvalues;  // descending
  Eigen::MatrixXd right;            // columns v_r
  Eigen::MatrixXd left;             // columns u_r, scaled so u_r . v_r = 1
  bool complete = false;
};
EigenDecomposition full_spectrum(const Eigen::MatrixXd& J, const InfluenceOptions& opt = {});

// Sum of u_r.q0 e^{kappa_r t} v_r over available modes; with a complete
// decomposition this reproduces q0 exactly at t = 0.
std::vector<double> linearized_solution(const EigenDecomposition& dec,
                                        const std::vector<double>& q0, double t);
// First term only (the principal-component approximation).
std::vector<double> principal_term(const EigenDecomposition& dec, const std::vector<double>& q0,
                                   double t);

struct ComparativeStaticsReport {
  int agent = 0;
  double delta = 0;
  double dxi_dpsi = 0;    // central difference of xi_agent w.r.t. psi_agent
  double dxi_dlambda = 0; // central difference of xi_agent w.r.t. lambda_agent
};
ComparativeStaticsReport comparative_statics_probe(const Graph& g, const PayoffMatrix& payoff,
                                                   const BehavioralParams& params, int agent,
                                                   double delta);

std::string influence_csv(const InfluenceReport& report, const Graph& g,
                          const BehavioralParams& params);

}  // namespace ewanet
