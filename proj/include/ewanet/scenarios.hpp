#pragma once

#include <string>
#include <vector>

#include "ewanet/dynamics.hpp"
#include "ewanet/graph.hpp"
#include "ewanet/payoff.hpp"

namespace ewanet {

// Drift sampled on a regular grid for a two-agent game, with isocline
// zero-crossings located by sign change per grid cell.
struct VectorFieldGrid {
  double lo = 0, hi = 0;
  int resolution = 0;
  struct Row {
    double q0, q1, f0, f1;
  };
  std::vector<Row> rows;
  int intersections = 0;  // connected clusters of cells where both isoclines cross
  std::vector<std::pair<double, double>> intersection_cells;  // cell centers
};

VectorFieldGrid vector_field(const Graph& g, const PayoffMatrix& payoff,
                             const BehavioralParams& params, double lo, double hi,
                             int resolution);
std::string vector_field_csv(const VectorFieldGrid& grid);

// Staged cascade toward the efficient option: agents currently favouring D
// run with large psi / small lambda (malleable), agents favouring C with
// small psi / large lambda (stubborn); stages advance as agents flip.
struct CascadeSpec {
  double psi_stubborn = 0.05;
  double lambda_stubborn = 20.0;
  double psi_malleable = 10.0;
  double lambda_malleable = 0.05;
  double eta = 1.0;
  double q_mag = 1.0;          // initial attraction magnitude per side
  double stage_horizon = 40.0;
  int max_stages = 64;
  double dt = 0;
};

struct CascadeStage {
  int stage = 0;
  std::string partition;  // bit string, 1 = favours D
  int d_count = 0;
};

struct CascadeTranscript {
  std::vector<CascadeStage> stages;
  bool full_cascade = false;  // every q_i ended negative
  bool stalled = false;       // partition stopped changing
  std::string final_partition;
};

CascadeTranscript cascade_scenario(const Graph& g, const PayoffMatrix& payoff,
                                   const std::vector<std::uint8_t>& initial_d,
                                   const CascadeSpec& spec = {});
std::string cascade_csv(const CascadeTranscript& t);

// Sweeps the risk-loving exponent; for each gamma the payoffs are transformed
// by (pi - pi_floor)^gamma and the dynamics run from the neutral state.
struct ReinforceBestRow {
  double gamma = 0;
  int outcome = 0;  // +1 risk-dominant absorbed, -1 efficient absorbed, 0 neither
};

struct ReinforceBestResult {
  std::vector<ReinforceBestRow> rows;
  double gamma_hat = 0;  // smallest grid gamma with efficient absorption
  bool found = false;
};

ReinforceBestResult reinforce_best_scenario(const Graph& g, const PayoffMatrix& payoff,
                                            const BehavioralParams& params,
                                            const std::vector<double>& gamma_grid,
                                            double pi_floor, double horizon = 400.0);
std::string reinforce_best_csv(const ReinforceBestResult& r);

}  // namespace ewanet
