#pragma once

#include <vector>

#include "dirpg/environment.hpp"

namespace dirpg {

/// Small enumerable environment whose state is the action prefix itself:
/// `num_actions`^`horizon` trajectories, a terminal reward read from a table
/// indexed by the trajectory's base-|A| code (first action most significant),
/// plus optional per-episode Gaussian noise on the terminal reward.
/// Features: one-hot over internal prefix-tree nodes, so a linear policy is
/// tabular.
class SequenceEnvironment final : public Environment {
 public:
  SequenceEnvironment(std::size_t num_actions, std::size_t horizon, std::vector<double> rewards,
                      double reward_noise_sd = 0.0);

  std::string name() const override { return "sequence"; }
  std::size_t num_actions() const override { return num_actions_; }
  std::size_t feature_dim() const override { return num_internal_; }
  std::size_t horizon() const override { return horizon_; }

  StepOutcome initial(std::span<const double> episode_noise) const override;
  StepOutcome step(const EnvState& state, ActionId action, std::span<const double> episode_noise,
                   Rng& node_rng) const override;
  void features(const EnvState& state, std::span<double> out) const override;
  double max_step_reward(std::span<const double> episode_noise) const override;
  double bound_to_go(const EnvState& state, std::size_t depth,
                     std::span<const double> episode_noise) const override;

  std::size_t num_trajectories() const { return rewards_.size(); }
  /// Base-|A| code of a complete trajectory.
  std::size_t code_of(std::span<const ActionId> trajectory) const;
  Prefix trajectory_of(std::size_t code) const;
  const std::vector<double>& rewards() const { return rewards_; }

 private:
  std::size_t num_actions_;
  std::size_t horizon_;
  std::vector<double> rewards_;
  double noise_sd_;
  std::size_t num_internal_;
  std::vector<std::size_t> level_offset_;
};

/// Sparse-reward toy: reward `m` on trajectory `target_code`, 0 elsewhere.
SequenceEnvironment make_sparse_reward_env(std::size_t num_actions, std::size_t horizon,
                                           std::size_t target_code, double m);

/// Deterministic multi-armed bandit: one step, arm i pays `rewards[i]`.
SequenceEnvironment make_deterministic_bandit(std::vector<double> rewards);

}  // namespace dirpg
