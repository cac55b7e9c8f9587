#include "dirpg/envs/spanning_tree_bandit.hpp"

#include <algorithm>
#include <stdexcept>

namespace dirpg {

SpanningTreeBandit::SpanningTreeBandit(Graph graph, LegalityRule rule) : graph_(std::move(graph)), rule_(rule) {
  if (!graph_.connected()) throw std::invalid_argument("SpanningTreeBandit: graph is disconnected");
  if (graph_.num_edges() == 0) throw std::invalid_argument("SpanningTreeBandit: graph has no edges");
}

std::vector<double> SpanningTreeBandit::sample_episode_noise(Rng& rng) const {
  std::vector<double> r(graph_.num_edges());
  for (std::size_t e = 0; e < r.size(); ++e) r[e] = uniform_real(rng, 0.0, 2.0 * graph_.edges[e].mu);
  return r;
}

ActionSet SpanningTreeBandit::legal_actions(const EnvState& state) const {
  const auto step = static_cast<std::size_t>(state[0]);
  UnionFind uf(graph_.num_vertices);
  int chosen = 0;
  for (std::size_t e = 0; e < step; ++e) {
    if (state[1 + e] != 0) {
      uf.unite(graph_.edges[e].u, graph_.edges[e].v);
      ++chosen;
    }
  }
  const Edge& edge = graph_.edges[step];
  if (uf.find(edge.u) == uf.find(edge.v)) return ActionSet::single(kExclude);
  if (rule_ == LegalityRule::count) {
    const auto remaining = static_cast<int>(graph_.num_edges() - step);
    if (chosen + remaining <= graph_.num_vertices - 1) return ActionSet::single(kInclude);
    return ActionSet::all(2);
  }
  int components = graph_.num_vertices - chosen;
  for (std::size_t e = step + 1; e < graph_.num_edges() && components > 1; ++e) {
    if (uf.unite(graph_.edges[e].u, graph_.edges[e].v)) --components;
  }
  if (components > 1) return ActionSet::single(kInclude);
  return ActionSet::all(2);
}

StepOutcome SpanningTreeBandit::initial(std::span<const double> /*episode_noise*/) const {
  StepOutcome out;
  out.state.assign(1 + graph_.num_edges(), 0);
  out.legal = legal_actions(out.state);
  return out;
}

StepOutcome SpanningTreeBandit::step(const EnvState& state, ActionId action,
                                     std::span<const double> episode_noise, Rng& /*node_rng*/) const {
  StepOutcome out;
  out.state = state;
  const auto step = static_cast<std::size_t>(state[0]);
  out.state[1 + step] = action == kInclude ? 1 : 0;
  out.state[0] = static_cast<std::int32_t>(step + 1);
  if (step + 1 == graph_.num_edges()) {
    out.terminal = true;
    if (is_valid_terminal(out.state)) {
      for (std::size_t e : chosen_edges(out.state)) out.reward += episode_noise[e];
    }
  } else {
    out.legal = legal_actions(out.state);
  }
  return out;
}

void SpanningTreeBandit::features(const EnvState& state, std::span<double> out) const {
  std::fill(out.begin(), out.end(), 0.0);
  const auto step = static_cast<std::size_t>(state[0]);
  if (step < out.size()) out[step] = 1.0;
}

double SpanningTreeBandit::max_step_reward(std::span<const double> episode_noise) const {
  double total = 0.0;
  for (double r : episode_noise) total += r;
  return total;
}

double SpanningTreeBandit::bound_to_go(const EnvState& state, std::size_t /*depth*/,
                                       std::span<const double> episode_noise) const {
  const auto step = static_cast<std::size_t>(state[0]);
  double total = 0.0;
  for (std::size_t e = 0; e < graph_.num_edges(); ++e) {
    if (e >= step || state[1 + e] != 0) total += episode_noise[e];
  }
  return total;
}

std::vector<std::size_t> SpanningTreeBandit::chosen_edges(const EnvState& state) const {
  std::vector<std::size_t> out;
  const auto step = static_cast<std::size_t>(state[0]);
  for (std::size_t e = 0; e < step; ++e) {
    if (state[1 + e] != 0) out.push_back(e);
  }
  return out;
}

bool SpanningTreeBandit::is_valid_terminal(const EnvState& state) const {
  const auto edges = chosen_edges(state);
  return is_spanning_tree(graph_, edges);
}

}  // namespace dirpg
