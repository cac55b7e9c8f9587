#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "dirpg/action_set.hpp"
#include "dirpg/rng.hpp"

namespace dirpg {

/// Opaque environment state; each environment defines its own layout.
using EnvState = std::vector<std::int32_t>;

struct StepOutcome {
  double reward = 0.0;
  EnvState state;
  bool terminal = false;
  /// Legal next actions; empty when terminal.
  ActionSet legal;
};

/// Reparameterized episodic environment. All randomness is supplied by the
/// caller: `episode_noise` is drawn once per noise tree, `node_rng` is a stream
/// addressed by (seed, prefix). Implementations must be deterministic given
/// those inputs.
class Environment {
 public:
  virtual ~Environment() = default;

  virtual std::string name() const = 0;
  virtual std::size_t num_actions() const = 0;
  virtual std::size_t feature_dim() const = 0;
  virtual std::size_t horizon() const = 0;

  virtual std::vector<double> sample_episode_noise(Rng& /*rng*/) const { return {}; }
  virtual StepOutcome initial(std::span<const double> episode_noise) const = 0;
  virtual StepOutcome step(const EnvState& state, ActionId action,
                           std::span<const double> episode_noise, Rng& node_rng) const = 0;
  virtual void features(const EnvState& state, std::span<double> out) const = 0;

  /// Largest reward a single step can produce under this episode's noise.
  virtual double max_step_reward(std::span<const double> episode_noise) const = 0;

  /// Admissible upper bound on the reward-to-go from a non-terminal state at
  /// `depth`. Default: remaining steps times the largest per-step reward.
  virtual double bound_to_go(const EnvState& state, std::size_t depth,
                             std::span<const double> episode_noise) const;

  /// False for terminal states that do not count as a usable outcome (e.g. a
  /// bandit trajectory that failed to build a spanning tree).
  virtual bool is_valid_terminal(const EnvState& /*state*/) const { return true; }
};

/// Lazily materialized map from action prefix to step outcome (the
/// environment's reparameterization). Outcomes are a deterministic function of
/// (master_seed, prefix). Single-writer; the environment must outlive it.
class NoiseTree {
 public:
  using NodeId = std::uint32_t;
  static constexpr NodeId kRoot = 0;
  static constexpr NodeId kNone = 0xffffffffu;

  NoiseTree(const Environment& env, std::uint64_t master_seed);

  const Environment& env() const { return *env_; }
  std::uint64_t master_seed() const { return master_seed_; }
  std::span<const double> episode_noise() const { return episode_noise_; }

  /// Materializes (or fetches) the child of `parent` under `action`. Counts one
  /// interaction on a cache miss. Throws ContractViolation for illegal actions.
  NodeId child(NodeId parent, ActionId action);
  /// Child if already materialized, else kNone.
  NodeId find_child(NodeId parent, ActionId action) const;

  /// Prefix-addressed step: `prefix` must already be materialized.
  const StepOutcome& step(std::span<const ActionId> prefix, ActionId action);
  /// Walks `prefix` from the root, materializing as needed.
  NodeId materialize(std::span<const ActionId> prefix);
  /// Node for an already-materialized prefix; ContractViolation otherwise.
  NodeId node_at(std::span<const ActionId> prefix) const;
  std::optional<NodeId> find(std::span<const ActionId> prefix) const;

  const StepOutcome& outcome(NodeId id) const { return nodes_[id].outcome; }
  std::span<const double> features(NodeId id) const;
  std::size_t depth(NodeId id) const { return nodes_[id].depth; }
  NodeId parent(NodeId id) const { return nodes_[id].parent; }
  ActionId action_into(NodeId id) const { return nodes_[id].action; }
  /// Sum of rewards along the path from the root to `id`.
  double accrued_return(NodeId id) const { return nodes_[id].accrued; }
  /// Stable hash of (master_seed, prefix); usable to address other streams.
  std::uint64_t path_hash(NodeId id) const { return nodes_[id].hash; }
  Prefix prefix_of(NodeId id) const;

  /// Number of cache misses so far (root excluded).
  std::size_t interactions() const { return interactions_; }
  /// Number of materialized prefixes including the root.
  std::size_t size() const { return nodes_.size(); }

 private:
  struct Node {
    NodeId parent = kNone;
    ActionId action = 0;
    std::uint32_t depth = 0;
    std::uint64_t hash = 0;
    double accrued = 0.0;
    StepOutcome outcome;
    std::vector<NodeId> children;
  };

  void finish_node(Node& node);

  const Environment* env_;
  std::uint64_t master_seed_;
  std::vector<double> episode_noise_;
  std::vector<Node> nodes_;
  std::vector<double> features_;  // feature_dim per node, contiguous
  std::size_t interactions_ = 0;
};

/// Fresh noise tree with an empty cache.
NoiseTree reset(const Environment& env, std::uint64_t seed);

/// Return of a complete trajectory, read from the cache only. Throws
/// ContractViolation when the trajectory is unmaterialized or not terminal.
double return_of(const NoiseTree& tree, std::span<const ActionId> trajectory);

/// Admissible upper bound on reward-to-go below a materialized prefix.
double heuristic_upper_bound(const NoiseTree& tree, NoiseTree::NodeId node);
double heuristic_upper_bound(const NoiseTree& tree, std::span<const ActionId> prefix);

std::string format_prefix(std::span<const ActionId> prefix);

}  // namespace dirpg
