#include "ewanet/graph.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

#include "ewanet/rng.hpp"

namespace ewanet {

namespace {

bool bfs_reaches_all(const std::vector<std::vector<int>>& adj, int n) {
  if (n <= 0) return false;
  std::vector<char> seen(n, 0);
  std::vector<int> stack{0};
  seen[0] = 1;
  int count = 1;
  while (!stack.empty()) {
    const int u = stack.back();
    stack.pop_back();
    for (int v : adj[u]) {
      if (!seen[v]) {
        seen[v] = 1;
        ++count;
        stack.push_back(v);
      }
    }
  }
  return count == n;
}

}  // namespace

Graph Graph::from_edges(int n, const std::vector<std::pair<int, int>>& edge_list) {
  if (n <= 0) throw std::invalid_argument("Graph: node count must be positive");
  std::set<std::pair<int, int>> unique;
  for (const auto& [a, b] : edge_list) {
    if (a < 0 || a >= n || b < 0 || b >= n)
      throw std::invalid_argument("Graph: endpoint out of range in edge (" + std::to_string(a) +
                                  "," + std::to_string(b) + ")");
    if (a == b)
      throw std::invalid_argument("Graph: self-loop at node " + std::to_string(a));
    unique.emplace(std::min(a, b), std::max(a, b));
  }
  Graph g;
  g.n_ = n;
  g.adj_.assign(n, {});
  g.edges_.assign(unique.begin(), unique.end());
  for (const auto& [u, v] : g.edges_) {
    g.adj_[u].push_back(v);
    g.adj_[v].push_back(u);
  }
  for (auto& nb : g.adj_) std::sort(nb.begin(), nb.end());
  g.connected_ = bfs_reaches_all(g.adj_, n);
  return g;
}

bool Graph::adjacent(int i, int j) const {
  const auto& nb = adj_[i];
  return std::binary_search(nb.begin(), nb.end(), j);
}

std::vector<int> Graph::degrees() const {
  std::vector<int> d(n_);
  for (int i = 0; i < n_; ++i) d[i] = degree(i);
  return d;
}

Graph erdos_renyi(int n, double p, std::uint64_t seed, bool require_connected, int max_redraws) {
  if (p < 0.0 || p > 1.0) throw std::invalid_argument("erdos_renyi: p must be in [0,1]");
  if (max_redraws < 1) throw std::invalid_argument("erdos_renyi: max_redraws must be >= 1");
  for (int round = 0; round < max_redraws; ++round) {
    const std::uint64_t round_seed = mix_u64(seed, static_cast<std::uint64_t>(round));
    std::vector<std::pair<int, int>> edges;
    std::uint64_t k = 0;
    for (int u = 0; u < n; ++u) {
      for (int v = u + 1; v < n; ++v, ++k) {
        if (unit_at(round_seed, k) < p) edges.emplace_back(u, v);
      }
    }
    Graph g = Graph::from_edges(n, edges);
    if (!require_connected || g.connected()) return g;
  }
  throw std::runtime_error("erdos_renyi: no connected draw within " +
                           std::to_string(max_redraws) + " attempts");
}

bool is_connected(const Graph& g) { return g.connected(); }

Cohesion cohesiveness(const Graph& g, const std::vector<int>& subset) {
  if (subset.empty()) throw std::invalid_argument("cohesiveness: empty subset");
  std::vector<char> in(g.size(), 0);
  for (int v : subset) {
    if (v < 0 || v >= g.size()) throw std::invalid_argument("cohesiveness: node out of range");
    in[v] = 1;
  }
  Rational best(1);
  bool first = true;
  for (int v : subset) {
    const int d = g.degree(v);
    if (d == 0)
      throw std::invalid_argument("cohesiveness: isolated node " + std::to_string(v) +
                                  " in subset");
    int inside = 0;
    for (int u : g.neighbors(v))
      if (in[u]) ++inside;
    const Rational frac(inside, d);
    if (first || frac < best) {
      best = frac;
      first = false;
    }
  }
  return Cohesion{best, subset};
}

std::vector<double> eigenvector_centrality(const Graph& g, double tol, int max_iter,
                                           double* kappa_out) {
  if (!g.connected())
    throw std::invalid_argument("eigenvector_centrality: graph must be connected");
  const int n = g.size();
  std::vector<double> v(n, 1.0 / std::sqrt(static_cast<double>(n)));
  std::vector<double> av(n, 0.0);
  double kappa = 0.0;
  for (int iter = 0; iter < max_iter; ++iter) {
    // (A + I) v — the shift keeps the dominant mode unique on bipartite graphs
    for (int i = 0; i < n; ++i) {
      double s = v[i];
      for (int j : g.neighbors(i)) s += v[j];
      av[i] = s;
    }
    double norm = 0.0;
    for (double x : av) norm += x * x;
    norm = std::sqrt(norm);
    for (int i = 0; i < n; ++i) v[i] = av[i] / norm;

    // Residual against the unshifted adjacency.
    kappa = 0.0;
    for (int i = 0; i < n; ++i) {
      double s = 0.0;
      for (int j : g.neighbors(i)) s += v[j];
      av[i] = s;
      kappa += v[i] * s;
    }
    double resid = 0.0;
    for (int i = 0; i < n; ++i) resid = std::max(resid, std::abs(av[i] - kappa * v[i]));
    if (resid <= tol) {
      if (kappa_out) *kappa_out = kappa;
      return v;
    }
  }
  throw std::runtime_error("eigenvector_centrality: no convergence within max_iter");
}

std::string to_edge_list(const Graph& g) {
  std::ostringstream os;
  os << g.size() << ' ' << g.edges().size() << '\n';
  for (const auto& [u, v] : g.edges()) os << u << ' ' << v << '\n';
  return os.str();
}

Graph parse_edge_list(const std::string& text) {
  std::istringstream is(text);
  int n = 0;
  std::size_t m = 0;
  if (!(is >> n >> m)) throw std::invalid_argument("parse_edge_list: bad header");
  std::vector<std::pair<int, int>> edges;
  edges.reserve(m);
  for (std::size_t k = 0; k < m; ++k) {
    int u = 0, v = 0;
    if (!(is >> u >> v))
      throw std::invalid_argument("parse_edge_list: truncated at edge " + std::to_string(k));
    edges.emplace_back(u, v);
  }
  return Graph::from_edges(n, edges);
}

Graph read_edge_list_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_edge_list(buf.str());
}

void write_edge_list_file(const Graph& g, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  out << to_edge_list(g);
}

}  // namespace ewanet
