#pragma once

#include "dirpg/environment.hpp"

namespace dirpg {

/// N x N DeepSea. The agent starts top-left and moves one row down per step:
/// L moves down-left (reward 0), R moves down-right (reward -1/3, or the
/// episode's single N(1, 1) draw when it lands in the bottom-right corner).
/// State: {row, col}. Features: one-hot over the N*N cells.
class DeepSea final : public Environment {
 public:
  enum : ActionId { kLeft = 0, kRight = 1 };

  explicit DeepSea(int size = 5);

  std::string name() const override { return "deep_sea"; }
  std::size_t num_actions() const override { return 2; }
  std::size_t feature_dim() const override { return static_cast<std::size_t>(size_ * size_); }
  std::size_t horizon() const override { return static_cast<std::size_t>(size_ - 1); }

  std::vector<double> sample_episode_noise(Rng& rng) const override;
  StepOutcome initial(std::span<const double> episode_noise) const override;
  StepOutcome step(const EnvState& state, ActionId action, std::span<const double> episode_noise,
                   Rng& node_rng) const override;
  void features(const EnvState& state, std::span<double> out) const override;
  double max_step_reward(std::span<const double> episode_noise) const override;

  int size() const { return size_; }
  static double goal_draw(std::span<const double> episode_noise) { return episode_noise[0]; }

 private:
  int size_;
};

}  // namespace dirpg
