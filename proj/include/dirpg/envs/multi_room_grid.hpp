#pragma once

#include <cstdint>
#include <string>

#include "dirpg/environment.hpp"

namespace dirpg {

struct MultiRoomConfig {
  int width = 25;
  int rooms = 6;
  int horizon = 100;
  std::uint64_t layout_seed = 0;
  double door_reward = 0.5;
  double goal_reward = 1.0;
};

/// Fully observable grid of `rooms` rooms chained by closed doors. Rooms sit on
/// a snake-ordered block grid; each consecutive pair shares a wall holding one
/// door. The layout (door positions, start, goal) comes from `layout_seed` and
/// is fixed for the environment's lifetime.
///
/// Actions: turn-left, turn-right, forward, toggle, and three no-ops.
/// Rewards: `door_reward` the first time each door is opened, `goal_reward`
/// on reaching the goal (terminal), 0 otherwise.
///
/// State: {x, y, dir, open_mask, ever_opened_mask, step}.
/// Features: normalized position, orientation one-hot, per-door open flags,
/// goal displacement, front-cell flags (closed door, blocked), and the next
/// target (first closed door in chain order, else the goal) expressed as
/// ahead / left components relative to the agent's heading.
class MultiRoomGrid final : public Environment {
 public:
  enum : ActionId { kTurnLeft = 0, kTurnRight = 1, kForward = 2, kToggle = 3, kNoop1 = 4, kNoop2 = 5, kNoop3 = 6 };
  enum Cell : std::uint8_t { kEmpty = 0, kWall = 1, kDoor = 2, kGoal = 3 };

  explicit MultiRoomGrid(MultiRoomConfig config = {});

  std::string name() const override { return "multi_room_grid"; }
  std::size_t num_actions() const override { return 7; }
  std::size_t feature_dim() const override;
  std::size_t horizon() const override { return static_cast<std::size_t>(config_.horizon); }

  StepOutcome initial(std::span<const double> episode_noise) const override;
  StepOutcome step(const EnvState& state, ActionId action, std::span<const double> episode_noise,
                   Rng& node_rng) const override;
  void features(const EnvState& state, std::span<double> out) const override;
  double max_step_reward(std::span<const double> episode_noise) const override;
  double bound_to_go(const EnvState& state, std::size_t depth,
                     std::span<const double> episode_noise) const override;

  const MultiRoomConfig& config() const { return config_; }
  int num_doors() const { return static_cast<int>(doors_.size()); }
  Cell cell(int x, int y) const { return cells_[static_cast<std::size_t>(y * config_.width + x)]; }
  int goal_x() const { return goal_x_; }
  int goal_y() const { return goal_y_; }
  /// ASCII rendering of the layout with the agent at `state`.
  std::string dump(const EnvState& state) const;
  std::string dump() const;

 private:
  struct Pos {
    int x;
    int y;
  };
  int door_at(int x, int y) const;
  bool passable(int x, int y, std::int32_t open_mask) const;

  MultiRoomConfig config_;
  std::vector<Cell> cells_;
  std::vector<Pos> doors_;
  int start_x_ = 0, start_y_ = 0, start_dir_ = 0;
  int goal_x_ = 0, goal_y_ = 0;
};

}  // namespace dirpg
