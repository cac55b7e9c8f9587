#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <numeric>
#include <span>
#include <string>
#include <vector>

namespace dirpg {

struct Edge {
  int u = 0;
  int v = 0;
  double mu = 0.0;
};

/// Undirected graph with per-edge mean rewards, vertices 0..n-1.
struct Graph {
  int num_vertices = 0;
  std::vector<Edge> edges;

  std::size_t num_edges() const { return edges.size(); }
  bool connected() const;
};

/// Parses the `u v mu` edge-list format: one edge per line, 0-indexed
/// vertices, blank lines and `#` comments ignored. Vertex count is one past
/// the largest index seen.
Graph parse_edge_list(std::istream& in);
Graph load_edge_list(const std::string& path);
void write_edge_list(std::ostream& out, const Graph& graph);

/// Connected random graph: a random spanning tree plus every other pair with
/// probability `extra_edge_prob`; mu_e ~ Uniform(mu_lo, mu_hi).
Graph random_graph(int num_vertices, double extra_edge_prob, std::uint64_t seed,
                   double mu_lo = 0.0, double mu_hi = 1.0);

class UnionFind {
 public:
  explicit UnionFind(int n) : parent_(static_cast<std::size_t>(n)) {
    std::iota(parent_.begin(), parent_.end(), 0);
  }
  int find(int x) {
    while (parent_[x] != x) {
      parent_[x] = parent_[parent_[x]];
      x = parent_[x];
    }
    return x;
  }
  bool unite(int a, int b) {
    a = find(a);
    b = find(b);
    if (a == b) return false;
    parent_[b] = a;
    return true;
  }

 private:
  std::vector<int> parent_;
};

/// Maximum-weight spanning tree by Kruskal's algorithm. Ties are broken by
/// ascending edge index; +inf weights are allowed. Returns ascending edge
/// indices. Throws std::invalid_argument if the graph is disconnected.
std::vector<std::size_t> max_spanning_tree(const Graph& graph, std::span<const double> weights);

/// True iff `edge_ids` has n-1 edges, no cycle, and touches every vertex.
bool is_spanning_tree(const Graph& graph, std::span<const std::size_t> edge_ids);

}  // namespace dirpg
