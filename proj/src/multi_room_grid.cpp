#include "dirpg/envs/multi_room_grid.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdlib>
#include <stdexcept>

namespace dirpg {

namespace {

constexpr int kDx[4] = {1, 0, -1, 0};  // east, south, west, north
constexpr int kDy[4] = {0, 1, 0, -1};

enum StateField { kX = 0, kY, kDir, kOpen, kEver, kStep };

int pick(Rng& rng, int lo, int hi) {  // inclusive
  return lo + static_cast<int>(rng() % static_cast<std::uint64_t>(hi - lo + 1));
}

}  // namespace

MultiRoomGrid::MultiRoomGrid(MultiRoomConfig config) : config_(config) {
  const int rooms = config_.rooms;
  const int w = config_.width;
  if (rooms < 1 || rooms > 31) throw std::invalid_argument("MultiRoomGrid: rooms must be in [1, 31]");
  if (config_.horizon < 1) throw std::invalid_argument("MultiRoomGrid: horizon must be positive");
  const int block_rows = rooms <= 3 ? 1 : 2;
  const int block_cols = (rooms + block_rows - 1) / block_rows;
  if (w < 4 * block_cols + 1 || w < 4 * block_rows + 1) {
    throw std::invalid_argument("MultiRoomGrid: width too small for the room count");
  }
  cells_.assign(static_cast<std::size_t>(w * w), kWall);

  std::vector<int> xs(block_cols + 1), ys(block_rows + 1);
  for (int k = 0; k <= block_cols; ++k) xs[k] = k * (w - 1) / block_cols;
  for (int k = 0; k <= block_rows; ++k) ys[k] = k * (w - 1) / block_rows;

  struct Room {
    int x0, y0, x1, y1;  // interior, inclusive
    int bc, br;
  };
  std::vector<Room> room_list;
  for (int r = 0; r < rooms; ++r) {
    const int br = r / block_cols;
    const int step = r % block_cols;
    const int bc = (br % 2 == 0) ? step : block_cols - 1 - step;
    Room room{xs[bc] + 1, ys[br] + 1, xs[bc + 1] - 1, ys[br + 1] - 1, bc, br};
    for (int y = room.y0; y <= room.y1; ++y) {
      for (int x = room.x0; x <= room.x1; ++x) cells_[static_cast<std::size_t>(y * w + x)] = kEmpty;
    }
    room_list.push_back(room);
  }

  Rng rng = make_rng(config_.layout_seed);
  for (int r = 0; r + 1 < rooms; ++r) {
    const Room& a = room_list[r];
    const Room& b = room_list[r + 1];
    Pos door{};
    if (a.br == b.br) {
      door.x = xs[std::max(a.bc, b.bc)];
      door.y = pick(rng, a.y0, a.y1);
    } else {
      door.y = ys[std::max(a.br, b.br)];
      door.x = pick(rng, a.x0, a.x1);
    }
    cells_[static_cast<std::size_t>(door.y * w + door.x)] = kDoor;
    doors_.push_back(door);
  }

  const Room& first = room_list.front();
  const Room& last = room_list.back();
  start_x_ = pick(rng, first.x0, first.x1);
  start_y_ = pick(rng, first.y0, first.y1);
  start_dir_ = pick(rng, 0, 3);
  do {
    goal_x_ = pick(rng, last.x0, last.x1);
    goal_y_ = pick(rng, last.y0, last.y1);
  } while (goal_x_ == start_x_ && goal_y_ == start_y_);
  cells_[static_cast<std::size_t>(goal_y_ * w + goal_x_)] = kGoal;
}

std::size_t MultiRoomGrid::feature_dim() const {
  return 2 + 4 + doors_.size() + 2 + 2 + 2;
}

int MultiRoomGrid::door_at(int x, int y) const {
  for (std::size_t i = 0; i < doors_.size(); ++i) {
    if (doors_[i].x == x && doors_[i].y == y) return static_cast<int>(i);
  }
  return -1;
}

bool MultiRoomGrid::passable(int x, int y, std::int32_t open_mask) const {
  if (x < 0 || y < 0 || x >= config_.width || y >= config_.width) return false;
  switch (cell(x, y)) {
    case kWall:
      return false;
    case kDoor:
      return ((open_mask >> door_at(x, y)) & 1) != 0;
    default:
      return true;
  }
}

StepOutcome MultiRoomGrid::initial(std::span<const double> /*episode_noise*/) const {
  return StepOutcome{0.0, {start_x_, start_y_, start_dir_, 0, 0, 0}, false, ActionSet::all(7)};
}

StepOutcome MultiRoomGrid::step(const EnvState& state, ActionId action,
                                std::span<const double> /*episode_noise*/, Rng& /*node_rng*/) const {
  StepOutcome out;
  out.state = state;
  auto& s = out.state;
  s[kStep] += 1;
  const int fx = s[kX] + kDx[s[kDir]];
  const int fy = s[kY] + kDy[s[kDir]];
  switch (action) {
    case kTurnLeft:
      s[kDir] = (s[kDir] + 3) % 4;
      break;
    case kTurnRight:
      s[kDir] = (s[kDir] + 1) % 4;
      break;
    case kForward:
      if (passable(fx, fy, s[kOpen])) {
        s[kX] = fx;
        s[kY] = fy;
        if (fx == goal_x_ && fy == goal_y_) {
          out.reward = config_.goal_reward;
          out.terminal = true;
        }
      }
      break;
    case kToggle:
      if (const int d = door_at(fx, fy); d >= 0) {
        s[kOpen] ^= (1 << d);
        if (((s[kOpen] >> d) & 1) && !((s[kEver] >> d) & 1)) {
          s[kEver] |= (1 << d);
          out.reward = config_.door_reward;
        }
      }
      break;
    default:
      break;
  }
  if (s[kStep] >= config_.horizon) out.terminal = true;
  if (!out.terminal) out.legal = ActionSet::all(7);
  return out;
}

void MultiRoomGrid::features(const EnvState& s, std::span<double> out) const {
  const double scale = static_cast<double>(config_.width - 1);
  std::size_t i = 0;
  out[i++] = s[kX] / scale;
  out[i++] = s[kY] / scale;
  for (int d = 0; d < 4; ++d) out[i++] = s[kDir] == d ? 1.0 : 0.0;
  for (std::size_t d = 0; d < doors_.size(); ++d) out[i++] = ((s[kOpen] >> d) & 1) ? 1.0 : 0.0;
  out[i++] = (goal_x_ - s[kX]) / scale;
  out[i++] = (goal_y_ - s[kY]) / scale;

  const int fx = s[kX] + kDx[s[kDir]];
  const int fy = s[kY] + kDy[s[kDir]];
  const int front_door = door_at(fx, fy);
  out[i++] = (front_door >= 0 && !((s[kOpen] >> front_door) & 1)) ? 1.0 : 0.0;
  out[i++] = passable(fx, fy, s[kOpen]) ? 0.0 : 1.0;

  int tx = goal_x_, ty = goal_y_;
  for (std::size_t d = 0; d < doors_.size(); ++d) {
    if (!((s[kOpen] >> d) & 1)) {
      tx = doors_[d].x;
      ty = doors_[d].y;
      break;
    }
  }
  const double dx = tx - s[kX];
  const double dy = ty - s[kY];
  const int dir = s[kDir];
  out[i++] = (dx * kDx[dir] + dy * kDy[dir]) / scale;  // ahead
  out[i++] = (dx * kDy[dir] - dy * kDx[dir]) / scale;  // to the left
}

double MultiRoomGrid::max_step_reward(std::span<const double> /*episode_noise*/) const {
  return std::max(config_.door_reward, config_.goal_reward);
}

double MultiRoomGrid::bound_to_go(const EnvState& s, std::size_t /*depth*/,
                                  std::span<const double> /*episode_noise*/) const {
  const int remaining = config_.horizon - s[kStep];
  if (remaining <= 0) return 0.0;
  auto manhattan = [](int ax, int ay, int bx, int by) { return std::abs(ax - bx) + std::abs(ay - by); };
  // Doors only become reachable in chain order, so the never-opened ones form
  // a suffix. Walk it with Manhattan distances (walls and turns ignored):
  // reaching the front of a door and toggling costs at least its distance.
  double bound = 0.0;
  int cost = 0;
  int px = s[kX], py = s[kY];
  bool first = true;
  for (int d = 0; d < num_doors(); ++d) {
    if ((s[kEver] >> d) & 1) continue;
    cost += manhattan(px, py, doors_[d].x, doors_[d].y) + (first ? 0 : 1);
    first = false;
    if (cost > remaining) return bound;
    bound += config_.door_reward;
    px = doors_[d].x;
    py = doors_[d].y;
  }
  cost += manhattan(px, py, goal_x_, goal_y_) + (first ? 0 : 1);
  if (cost <= remaining) bound += config_.goal_reward;
  return bound;
}

std::string MultiRoomGrid::dump(const EnvState& s) const {
  static constexpr char kArrow[4] = {'>', 'v', '<', '^'};
  std::string out;
  for (int y = 0; y < config_.width; ++y) {
    for (int x = 0; x < config_.width; ++x) {
      char c = '.';
      switch (cell(x, y)) {
        case kWall: c = '#'; break;
        case kDoor: c = ((s[kOpen] >> door_at(x, y)) & 1) ? '/' : 'D'; break;
        case kGoal: c = 'G'; break;
        default: break;
      }
      if (x == s[kX] && y == s[kY]) c = kArrow[s[kDir]];
      out += c;
    }
    out += '\n';
  }
  return out;
}

std::string MultiRoomGrid::dump() const { return dump(initial({}).state); }

}  // namespace dirpg
