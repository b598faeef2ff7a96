#include "doctest.h"

#include "ewanet/scenarios.hpp"

using namespace ewanet;

namespace {

const PayoffMatrix example1 = PayoffMatrix::make(4, -2, 1, 2);
const Graph dyad = Graph::from_edges(2, {{0, 1}});

Graph line_graph(int n) {
  std::vector<std::pair<int, int>> edges;
  for (int i = 0; i + 1 < n; ++i) edges.emplace_back(i, i + 1);
  return Graph::from_edges(n, edges);
}

}  // namespace

TEST_CASE("vector field: bistable parameters show three isocline intersections") {
  const auto params = BehavioralParams::uniform(2, 0.5, 1.0, 1.0);
  const auto grid = vector_field(dyad, example1, params, -10, 10, 80);
  CHECK(grid.intersections == 3);
}

TEST_CASE("vector field: forgetful parameters show one intersection, positive quadrant") {
  const auto params = BehavioralParams::uniform(2, 1.0, 0.5, 1.0);
  const auto grid = vector_field(dyad, example1, params, -10, 10, 80);
  REQUIRE(grid.intersections == 1);
  CHECK(grid.intersection_cells[0].first > 0);
  CHECK(grid.intersection_cells[0].second > 0);
}

TEST_CASE("vector field arrows equal the drift") {
  const auto params = BehavioralParams::uniform(2, 0.5, 1.0, 1.0);
  const auto grid = vector_field(dyad, example1, params, -10, 10, 20);
  const auto f = drift_q({0.0, 0.0}, dyad, example1, params);
  bool seen = false;
  for (const auto& r : grid.rows) {
    if (r.q0 == 0.0 && r.q1 == 0.0) {
      CHECK(r.f0 == doctest::Approx(f[0]));
      CHECK(r.f1 == doctest::Approx(f[1]));
      seen = true;
    }
  }
  CHECK(seen);
}

TEST_CASE("vector field rejects non-dyads") {
  const auto g3 = Graph::from_edges(3, {{0, 1}, {1, 2}});
  CHECK_THROWS_AS(vector_field(g3, example1, BehavioralParams::uniform(3, 1, 1, 1), -1, 1, 10),
                  std::invalid_argument);
}

TEST_CASE("staged cascade flips a line segment that lacks cohesive protection") {
  // Threshold 2(z-x)/(z-x+w-y) = 6/7; any proper sub-segment of the line has
  // cohesiveness at most 1/2, so the staged construction must clear it.
  const Graph line = line_graph(8);
  std::vector<std::uint8_t> initial_d(8, 0);
  initial_d[3] = initial_d[4] = 1;
  const auto transcript = cascade_scenario(line, example1, initial_d);
  CHECK(transcript.full_cascade);
  CHECK(transcript.stages.back().d_count == 0);
}

TEST_CASE("cascade cannot start from the all-D profile") {
  const Graph line = line_graph(8);
  const std::vector<std::uint8_t> initial_d(8, 1);
  const auto transcript = cascade_scenario(line, example1, initial_d);
  CHECK(!transcript.full_cascade);
  CHECK(transcript.stages.back().d_count == 8);
}

TEST_CASE("without staging a cohesive D segment survives") {
  // Homogeneous accurate agents: the interior segment is 1/2-cohesive and
  // 1/2 exceeds the best-response threshold 3/7, so it persists.
  const Graph line = line_graph(8);
  std::vector<std::uint8_t> initial_d(8, 0);
  initial_d[3] = initial_d[4] = 1;
  CascadeSpec flat;
  flat.psi_stubborn = flat.psi_malleable = 1.0;
  flat.lambda_stubborn = flat.lambda_malleable = 8.0;
  flat.q_mag = 2.0;
  const auto transcript = cascade_scenario(line, example1, initial_d, flat);
  CHECK(!transcript.full_cascade);
  CHECK(transcript.stages.back().d_count >= 2);
}

TEST_CASE("reinforce-best sweep: risk dominance at gamma = 1, efficiency for large gamma") {
  const Graph line = line_graph(4);
  const auto params = BehavioralParams::uniform(4, 5.0, 0.3, 0.5);
  const std::vector<double> grid{1.0, 1.5, 2.0, 2.5, 3.0};
  const auto result = reinforce_best_scenario(line, example1, params, grid, -3.0);
  REQUIRE(result.rows.size() == grid.size());
  CHECK(result.rows.front().outcome == 1);   // risk-dominant absorption
  CHECK(result.rows.back().outcome == -1);   // efficient absorption
  CHECK(result.found);
  CHECK(result.gamma_hat > 1.0);
}
