#pragma once

#include <complex>
#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "ewanet/dynamics.hpp"
#include "ewanet/graph.hpp"
#include "ewanet/payoff.hpp"

namespace ewanet {

struct FixedPointRecord {
  std::vector<double> q_star;
  std::vector<double> p_star;
  double residual = 0;  // |F(q*)|_inf
  std::vector<std::complex<double>> eigenvalues;
  double max_re_eigenvalue = 0;
  bool stable = false;    // all real parts < -margin
  bool marginal = false;  // some real part within +-margin of zero
  std::vector<std::vector<double>> basin_witnesses;
};

struct BECensus {
  std::vector<FixedPointRecord> records;
  int starts_used = 0;
  int duplicates_merged = 0;
  int failed_starts = 0;

  int stable_count() const;
};

struct CensusOptions {
  double tol = 1e-10;
  double dedup_radius = 1e-5;     // L_inf in q-space
  int max_newton_iter = 60;
  int corner_cap = 12;            // sign-pattern corners used when n <= cap
  int random_starts = 64;
  int forward_starts = 8;         // integration endpoints seeded into Newton
  double stability_margin = 1e-8;
  std::uint64_t seed = 20240902;
  bool parallel = true;
  double forward_horizon = 2000;
};

// Analytic Jacobian of the drift at q (cross-checked against finite
// differences in the test suite).
Eigen::MatrixXd jacobian(const std::vector<double>& q, const Graph& g,
                         const PayoffMatrix& payoff, const BehavioralParams& params,
                         double t = 0);

// Damped-Newton multi-start root census. Starts: all 2^n sign-pattern corners
// scaled per agent by the drift magnitude bound / psi (for n <= corner_cap),
// uniform random starts in that box, and forward-integration endpoints.
// Converged roots are deduplicated and classified by the Jacobian spectrum.
BECensus find_fixed_points(const Graph& g, const PayoffMatrix& payoff,
                           const BehavioralParams& params, const CensusOptions& opt = {});

// Number of stable, non-marginal records (the behavioural equilibria).
int count_be(const BECensus& census);

struct AbsorptionReport {
  bool all_risk_dominant = false;  // every endpoint has q* > 0 elementwise
  int endpoints = 0;
  int failures = 0;
  std::vector<std::vector<double>> failing_endpoints;
};

// Integrates from sampled starts (always including strongly C-favoring ones)
// and reports whether every endpoint favours the risk-dominant option.
AbsorptionReport risk_dominant_absorption_probe(const Graph& g, const PayoffMatrix& payoff,
                                                const BehavioralParams& params, int sample_starts,
                                                std::uint64_t seed,
                                                const IntegratorOptions& integ = {});

std::string census_csv(const BECensus& census);

}  // namespace ewanet
