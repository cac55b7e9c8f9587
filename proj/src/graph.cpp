#include "dirpg/graph.hpp"

#include <algorithm>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "dirpg/rng.hpp"

namespace dirpg {

bool Graph::connected() const {
  if (num_vertices <= 1) return true;
  UnionFind uf(num_vertices);
  int components = num_vertices;
  for (const auto& e : edges) components -= uf.unite(e.u, e.v) ? 1 : 0;
  return components == 1;
}

Graph parse_edge_list(std::istream& in) {
  Graph g;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream ls(line);
    Edge e;
    if (!(ls >> e.u)) continue;
    if (!(ls >> e.v >> e.mu) || e.u < 0 || e.v < 0 || e.u == e.v) {
      throw std::invalid_argument("edge list line " + std::to_string(line_no) +
                                  ": expected `u v mu` with distinct nonnegative vertices");
    }
    std::string rest;
    if (ls >> rest) {
      throw std::invalid_argument("edge list line " + std::to_string(line_no) + ": trailing data");
    }
    g.num_vertices = std::max({g.num_vertices, e.u + 1, e.v + 1});
    g.edges.push_back(e);
  }
  return g;
}

Graph load_edge_list(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open edge list " + path);
  return parse_edge_list(in);
}

void write_edge_list(std::ostream& out, const Graph& graph) {
  out.precision(17);
  for (const auto& e : graph.edges) out << e.u << ' ' << e.v << ' ' << e.mu << '\n';
}

Graph random_graph(int num_vertices, double extra_edge_prob, std::uint64_t seed, double mu_lo,
                   double mu_hi) {
  if (num_vertices < 2) throw std::invalid_argument("random_graph: need at least 2 vertices");
  Rng rng = make_rng(seed);
  Graph g;
  g.num_vertices = num_vertices;
  std::vector<std::vector<bool>> present(num_vertices, std::vector<bool>(num_vertices, false));
  // Random tree: attach vertex i to a uniformly chosen earlier vertex.
  for (int i = 1; i < num_vertices; ++i) {
    const int j = static_cast<int>(rng() % static_cast<std::uint64_t>(i));
    present[i][j] = present[j][i] = true;
  }
  for (int i = 0; i < num_vertices; ++i) {
    for (int j = i + 1; j < num_vertices; ++j) {
      if (!present[i][j] && uniform_real(rng, 0.0, 1.0) < extra_edge_prob) present[i][j] = true;
      if (present[i][j] || present[j][i]) g.edges.push_back({i, j, uniform_real(rng, mu_lo, mu_hi)});
    }
  }
  return g;
}

std::vector<std::size_t> max_spanning_tree(const Graph& graph, std::span<const double> weights) {
  if (weights.size() != graph.num_edges()) {
    throw std::invalid_argument("max_spanning_tree: one weight per edge required");
  }
  std::vector<std::size_t> order(graph.num_edges());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return weights[a] > weights[b]; });
  UnionFind uf(graph.num_vertices);
  std::vector<std::size_t> tree;
  for (std::size_t id : order) {
    if (uf.unite(graph.edges[id].u, graph.edges[id].v)) tree.push_back(id);
  }
  if (static_cast<int>(tree.size()) != graph.num_vertices - 1) {
    throw std::invalid_argument("max_spanning_tree: graph is disconnected");
  }
  std::sort(tree.begin(), tree.end());
  return tree;
}

bool is_spanning_tree(const Graph& graph, std::span<const std::size_t> edge_ids) {
  if (static_cast<int>(edge_ids.size()) != graph.num_vertices - 1) return false;
  UnionFind uf(graph.num_vertices);
  for (std::size_t id : edge_ids) {
    if (id >= graph.num_edges() || !uf.unite(graph.edges[id].u, graph.edges[id].v)) return false;
  }
  return true;  // n-1 acyclic edges on n vertices are connected
}

}  // namespace dirpg
