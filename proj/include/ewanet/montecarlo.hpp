#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "ewanet/dynamics.hpp"
#include "ewanet/graph.hpp"
#include "ewanet/influence.hpp"
#include "ewanet/payoff.hpp"

namespace ewanet {

// Seeded Monte Carlo battery over random graphs, payoffs, behavioural
// parameters and initial attractions. Every simulation is reproducible in
// isolation from hash(master_seed, sim index).
struct ExperimentConfig {
  int n_sims = 2000;
  int n = 100;
  double p = 0.1;
  bool require_connected = true;
  int max_redraws = 1000;

  // Symmetric payoff pool, one row drawn per simulation with equal odds.
  std::array<std::array<double, 2>, 2> payoff_pool{{{2.0, -1.0}, {1.0, -2.0}}};

  // Uniform priors whose bounds are themselves drawn per simulation.
  double psi_bound_lo = 0.1, psi_bound_hi = 10.0;
  double lambda_bound_lo = 0.1, lambda_bound_hi = 10.0;
  double eta_bound_lo = 0.0, eta_bound_hi = 1.0;
  // The upper bound 3 reproduces the published accuracy profile (the
  // prediction-accuracy curve runs out to sigma(q0) near 3).
  double sigma_q_lo = 0.01, sigma_q_hi = 3.0;

  std::uint64_t master_seed = 1;

  double horizon = 600.0;
  double dt = 0;             // <= 0: per-simulation suggested step
  double conv_tol = 1e-7;
  double consensus_margin = 1e-6;
  // Once every q_i clears this margin with a uniform sign and the drift
  // points outward, the cooperative flow can no longer leave the orthant;
  // the simulation is classified without polishing the fixed point.
  double trap_margin = 1e-3;

  bool parallel = true;
};

enum class Consensus { AllD, AllC, Mixed, NonConverged };
std::string to_string(Consensus c);

struct SimRecord {
  std::uint64_t seed = 0;
  double kappa1 = 0;
  CoordinationPrediction prediction = CoordinationPrediction::Indeterminate;
  Consensus consensus = Consensus::NonConverged;
  double sigma_q0 = 0;       // realized sample sd of q(0)
  double cr_centrality = 0;  // Pearson(q0, adjacency eigenvector centrality)
  double cr_lambda = 0;      // Pearson(q0, lambda)
  double mu_lambda = 0;
  int payoff_id = 0;
  bool failed = false;       // per-sim failure, recorded, never fatal

  bool operator==(const SimRecord&) const = default;
};

std::vector<SimRecord> run_battery(const ExperimentConfig& config);

struct AccuracyBin {
  double sigma_lo = 0, sigma_hi = 0;
  int count = 0;
  int correct = 0;
  double accuracy = 0;
};

struct AccuracyTable {
  bool empty = false;  // explicit marker when the kappa1 > 0 filter removes everything
  int kappa_pos = 0;
  int considered_d = 0, considered_c = 0;  // consensus-reaching predictions
  double acc_d = 0, acc_c = 0;             // conditional on reaching consensus
  double acc_d_incl = 0, acc_c_incl = 0;   // counting mixed/nonconverged as misses
  std::vector<AccuracyBin> bins;           // equal-count bins over sigma(q0)
  AccuracyBin low_sigma;                   // dedicated sigma(q0) < 0.1 row
};

AccuracyTable accuracy_summary(const std::vector<SimRecord>& records, int bins = 10);

enum class PdStatistic { CrCentrality, CrLambda };

struct PdBin {
  double lo = 0, hi = 0, center = 0;
  int count = 0;
  int all_d = 0;
  double freq = 0;
  bool low_confidence = false;  // fewer than 30 records
};

struct PartialDependenceTable {
  PdStatistic statistic = PdStatistic::CrCentrality;
  std::vector<PdBin> bins;
  double band_lo = 0, band_hi = 0;  // mu(lambda) band when stratified
  double slope = 0;                 // least-squares freq ~ cr over bins
};

PartialDependenceTable partial_dependence(const std::vector<SimRecord>& records, PdStatistic stat,
                                          int bins = 20);
std::vector<PartialDependenceTable> partial_dependence_by_lambda_band(
    const std::vector<SimRecord>& records, int bands = 3, int bins = 10);

std::string records_csv(const std::vector<SimRecord>& records);
std::string accuracy_csv(const AccuracyTable& table);
std::string partial_dependence_csv(const std::vector<PartialDependenceTable>& tables);

double pearson(const std::vector<double>& a, const std::vector<double>& b);
double sample_sd(const std::vector<double>& v);

}  // namespace ewanet
