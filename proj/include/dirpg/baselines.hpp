#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "dirpg/envs/spanning_tree_bandit.hpp"
#include "dirpg/graph.hpp"
#include "dirpg/optimizer.hpp"
#include "dirpg/policy.hpp"
#include "dirpg/training.hpp"

namespace dirpg {

/// One on-policy rollout inside a noise tree.
struct Rollout {
  NoiseTree::NodeId terminal = NoiseTree::kRoot;
  std::vector<double> rewards;  // per step
  double ret = 0.0;
};

Rollout sample_rollout(const PolicyParams& params, NoiseTree& tree, Rng& rng);

enum class ReinforceVariant { trajectory, action_level };

struct ScoreEstimate {
  std::vector<double> grad;
  double mean_return = 0.0;
  std::size_t steps = 0;  // environment steps taken by all rollouts
};

/// Mean over k rollouts from one reset of the environment. Trajectory
/// variant: R(tau) grad log Pi(tau). Action-level variant: reward-to-go per
/// step minus a baseline b, where b is the per-step average reward of the
/// other k-1 rollouts (0 when k = 1), so the estimate stays unbiased.
ScoreEstimate reinforce_gradient(const PolicyParams& params, const Environment& env, std::size_t k,
                                 ReinforceVariant variant, std::uint64_t seed);

/// Mean grad log Pi over the `elite` highest-return of n rollouts. Ties in
/// return go to the lower rollout index.
ScoreEstimate cem_update(const PolicyParams& params, const Environment& env, std::size_t n,
                         std::size_t elite, std::uint64_t seed);

struct ScoreSettings {
  std::size_t rollouts = 30;
  std::size_t elite = 2;  // CEM only
  OptimizerKind optimizer = OptimizerKind::adaptive_moment;
  double learning_rate = 0.001;
  std::size_t episodes = 1000;
};

TrainResult train_reinforce(const Environment& env, PolicyParams init, ReinforceVariant variant,
                            const ScoreSettings& settings, std::uint64_t seed, const ProgressFn& progress = {});
TrainResult train_cem(const Environment& env, PolicyParams init, const ScoreSettings& settings,
                      std::uint64_t seed, const ProgressFn& progress = {});

struct UcbStats {
  std::vector<double> mean_reward;
  std::vector<std::size_t> pull_count;
  std::size_t time = 1;

  explicit UcbStats(std::size_t num_edges) : mean_reward(num_edges, 0.0), pull_count(num_edges, 0) {}
};

enum class BanditFeedback { semi, full };

/// u_e = mean_e + 1.5 log t / c_e, +inf for unpulled edges.
std::vector<double> ucb_scores(const UcbStats& stats);

/// Maximum spanning tree under the UCB scores (ties by ascending edge index).
std::vector<std::size_t> ucb_select_tree(const UcbStats& stats, const Graph& graph);

/// Semi: each chosen edge observes its own reward. Full: each chosen edge is
/// credited tree_reward / (n - 1). Advances time by one.
void ucb_update(UcbStats& stats, const Graph& graph, std::span<const std::size_t> tree,
                std::span<const double> edge_rewards, BanditFeedback feedback);

/// One tree per episode, one interaction per tree. Episode e draws edge
/// rewards from the same noise tree DirPG would see for that episode.
TrainResult run_ucb(const SpanningTreeBandit& env, BanditFeedback feedback, std::size_t episodes,
                    std::uint64_t seed, const ProgressFn& progress = {});

}  // namespace dirpg
