#include "dirpg/envs/sequence_env.hpp"

#include <algorithm>
#include <stdexcept>

#include "dirpg/gumbel.hpp"

namespace dirpg {

namespace {
enum StateField { kDepth = 0, kCode = 1 };
}

SequenceEnvironment::SequenceEnvironment(std::size_t num_actions, std::size_t horizon,
                                         std::vector<double> rewards, double reward_noise_sd)
    : num_actions_(num_actions), horizon_(horizon), rewards_(std::move(rewards)), noise_sd_(reward_noise_sd) {
  if (num_actions < 2 || num_actions > ActionSet::kMaxActions) {
    throw std::invalid_argument("SequenceEnvironment: need 2..64 actions");
  }
  if (horizon < 1) throw std::invalid_argument("SequenceEnvironment: horizon must be >= 1");
  std::size_t count = 1;
  num_internal_ = 0;
  for (std::size_t t = 0; t < horizon; ++t) {
    level_offset_.push_back(num_internal_);
    num_internal_ += count;
    count *= num_actions;
    if (count > (1u << 20)) throw std::invalid_argument("SequenceEnvironment: too many trajectories");
  }
  if (rewards_.size() != count) {
    throw std::invalid_argument("SequenceEnvironment: reward table needs |A|^T entries");
  }
}

StepOutcome SequenceEnvironment::initial(std::span<const double> /*episode_noise*/) const {
  return StepOutcome{0.0, {0, 0}, false, ActionSet::all(num_actions_)};
}

StepOutcome SequenceEnvironment::step(const EnvState& state, ActionId action,
                                      std::span<const double> /*episode_noise*/, Rng& node_rng) const {
  StepOutcome out;
  const auto depth = static_cast<std::size_t>(state[kDepth]) + 1;
  const auto code = static_cast<std::size_t>(state[kCode]) * num_actions_ + action;
  out.state = {static_cast<std::int32_t>(depth), static_cast<std::int32_t>(code)};
  if (depth == horizon_) {
    out.terminal = true;
    out.reward = rewards_[code] + (noise_sd_ > 0.0 ? noise_sd_ * standard_normal(node_rng) : 0.0);
  } else {
    out.legal = ActionSet::all(num_actions_);
  }
  return out;
}

void SequenceEnvironment::features(const EnvState& state, std::span<double> out) const {
  std::fill(out.begin(), out.end(), 0.0);
  const auto depth = static_cast<std::size_t>(state[kDepth]);
  if (depth < horizon_) out[level_offset_[depth] + static_cast<std::size_t>(state[kCode])] = 1.0;
}

double SequenceEnvironment::max_step_reward(std::span<const double> /*episode_noise*/) const {
  if (noise_sd_ > 0.0) return kInf;
  return std::max(0.0, *std::max_element(rewards_.begin(), rewards_.end()));
}

double SequenceEnvironment::bound_to_go(const EnvState& state, std::size_t /*depth*/,
                                        std::span<const double> /*episode_noise*/) const {
  if (noise_sd_ > 0.0) return kInf;
  const auto depth = static_cast<std::size_t>(state[kDepth]);
  std::size_t span = 1;
  for (std::size_t t = depth; t < horizon_; ++t) span *= num_actions_;
  const std::size_t first = static_cast<std::size_t>(state[kCode]) * span;
  return *std::max_element(rewards_.begin() + static_cast<std::ptrdiff_t>(first),
                           rewards_.begin() + static_cast<std::ptrdiff_t>(first + span));
}

std::size_t SequenceEnvironment::code_of(std::span<const ActionId> trajectory) const {
  std::size_t code = 0;
  for (ActionId a : trajectory) code = code * num_actions_ + a;
  return code;
}

Prefix SequenceEnvironment::trajectory_of(std::size_t code) const {
  Prefix out(horizon_);
  for (std::size_t t = horizon_; t > 0; --t) {
    out[t - 1] = static_cast<ActionId>(code % num_actions_);
    code /= num_actions_;
  }
  return out;
}

SequenceEnvironment make_sparse_reward_env(std::size_t num_actions, std::size_t horizon,
                                           std::size_t target_code, double m) {
  std::size_t count = 1;
  for (std::size_t t = 0; t < horizon; ++t) count *= num_actions;
  std::vector<double> rewards(count, 0.0);
  rewards.at(target_code) = m;
  return SequenceEnvironment(num_actions, horizon, std::move(rewards));
}

SequenceEnvironment make_deterministic_bandit(std::vector<double> rewards) {
  const std::size_t n = rewards.size();
  return SequenceEnvironment(n, 1, std::move(rewards));
}

}  // namespace dirpg
