#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "ewanet/rational.hpp"

namespace ewanet {

// Undirected simple graph over nodes {0..n-1}. Immutable after construction,
// safe to share across threads.
class Graph {
 public:
  static Graph from_edges(int n, const std::vector<std::pair<int, int>>& edge_list);

  int size() const { return n_; }
  int degree(int i) const { return static_cast<int>(adj_[i].size()); }
  std::span<const int> neighbors(int i) const { return adj_[i]; }
  bool adjacent(int i, int j) const;
  bool connected() const { return connected_; }
  const std::vector<std::pair<int, int>>& edges() const { return edges_; }
  std::vector<int> degrees() const;

 private:
  int n_ = 0;
  bool connected_ = false;
  std::vector<std::vector<int>> adj_;        // sorted neighbor lists
  std::vector<std::pair<int, int>> edges_;   // sorted unique (u < v)
};

struct Cohesion {
  Rational value;
  std::vector<int> subset;
};

// Each unordered pair (u,v) is included independently with probability p;
// the indicator for pair index k is a pure function of (seed, redraw round, k).
// With require_connected the whole graph is redrawn until connected.
Graph erdos_renyi(int n, double p, std::uint64_t seed, bool require_connected = false,
                  int max_redraws = 1000);

bool is_connected(const Graph& g);

// min over members of (neighbors inside subset) / degree, in exact integer
// arithmetic. Rejects empty subsets and subsets containing isolated nodes.
Cohesion cohesiveness(const Graph& g, const std::vector<int>& subset);

// Principal adjacency eigenvector by power iteration (shifted by +I so the
// iteration also converges on bipartite graphs). Nonnegative, L2-normalized;
// on return |A v - kappa v|_inf <= tol. kappa_out receives the Rayleigh
// estimate of the top eigenvalue when non-null.
std::vector<double> eigenvector_centrality(const Graph& g, double tol = 1e-10,
                                           int max_iter = 100000, double* kappa_out = nullptr);

// Edge-list text format: first line "n m", then m lines "u v" (0-based).
std::string to_edge_list(const Graph& g);
Graph parse_edge_list(const std::string& text);
Graph read_edge_list_file(const std::string& path);
void write_edge_list_file(const Graph& g, const std::string& path);

}  // namespace ewanet
