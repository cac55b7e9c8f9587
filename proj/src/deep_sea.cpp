#include "dirpg/envs/deep_sea.hpp"

#include <algorithm>
#include <stdexcept>

namespace dirpg {

DeepSea::DeepSea(int size) : size_(size) {
  if (size < 2) throw std::invalid_argument("DeepSea: size must be >= 2");
}

std::vector<double> DeepSea::sample_episode_noise(Rng& rng) const {
  return {1.0 + standard_normal(rng)};
}

StepOutcome DeepSea::initial(std::span<const double> /*episode_noise*/) const {
  return StepOutcome{0.0, {0, 0}, false, ActionSet::all(2)};
}

StepOutcome DeepSea::step(const EnvState& state, ActionId action,
                          std::span<const double> episode_noise, Rng& /*node_rng*/) const {
  const int row = state[0] + 1;
  StepOutcome out;
  if (action == kLeft) {
    out.state = {row, std::max(state[1] - 1, 0)};
    out.reward = 0.0;
  } else {
    const int col = std::min(state[1] + 1, size_ - 1);
    out.state = {row, col};
    const bool corner = row == size_ - 1 && col == size_ - 1;
    out.reward = corner ? goal_draw(episode_noise) : -1.0 / 3.0;
  }
  out.terminal = row == size_ - 1;
  if (!out.terminal) out.legal = ActionSet::all(2);
  return out;
}

void DeepSea::features(const EnvState& state, std::span<double> out) const {
  std::fill(out.begin(), out.end(), 0.0);
  out[static_cast<std::size_t>(state[0] * size_ + state[1])] = 1.0;
}

double DeepSea::max_step_reward(std::span<const double> episode_noise) const {
  return std::max(0.0, goal_draw(episode_noise));
}

}  // namespace dirpg
