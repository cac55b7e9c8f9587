#pragma once

#include "dirpg/environment.hpp"
#include "dirpg/graph.hpp"

namespace dirpg {

/// Combinatorial bandit over spanning trees. A trajectory is one include /
/// exclude decision per edge, in edge order. Per-episode edge rewards
/// r_e ~ Uniform(0, 2 mu_e) are drawn once per noise tree; the terminal step
/// pays the sum over chosen edges when they form a spanning tree and 0
/// otherwise.
///
/// Legal actions: an edge that would close a cycle can only be excluded.
/// LegalityRule::count forces inclusion when the remaining steps are exactly
/// enough to reach n-1 edges; this can still strand a vertex, so invalid trees
/// (reward 0) remain possible. LegalityRule::connectivity forces inclusion
/// whenever excluding would leave the graph unconnectable, which makes every
/// completed trajectory a spanning tree.
///
/// State: {step, chosen_0, ..., chosen_{|E|-1}}. Features: one-hot of step.
enum class LegalityRule { count, connectivity };

class SpanningTreeBandit final : public Environment {
 public:
  enum : ActionId { kExclude = 0, kInclude = 1 };

  explicit SpanningTreeBandit(Graph graph, LegalityRule rule = LegalityRule::count);

  std::string name() const override { return "spanning_tree_bandit"; }
  std::size_t num_actions() const override { return 2; }
  std::size_t feature_dim() const override { return graph_.num_edges(); }
  std::size_t horizon() const override { return graph_.num_edges(); }

  std::vector<double> sample_episode_noise(Rng& rng) const override;
  StepOutcome initial(std::span<const double> episode_noise) const override;
  StepOutcome step(const EnvState& state, ActionId action, std::span<const double> episode_noise,
                   Rng& node_rng) const override;
  void features(const EnvState& state, std::span<double> out) const override;
  double max_step_reward(std::span<const double> episode_noise) const override;
  double bound_to_go(const EnvState& state, std::size_t depth,
                     std::span<const double> episode_noise) const override;
  bool is_valid_terminal(const EnvState& state) const override;

  const Graph& graph() const { return graph_; }
  LegalityRule legality_rule() const { return rule_; }
  /// Edge indices included by a complete state.
  std::vector<std::size_t> chosen_edges(const EnvState& state) const;
  /// Legal actions before deciding on edge `step` given the chosen flags.
  ActionSet legal_actions(const EnvState& state) const;

 private:
  Graph graph_;
  LegalityRule rule_;
};

}  // namespace dirpg
