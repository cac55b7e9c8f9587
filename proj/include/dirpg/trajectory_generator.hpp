#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <vector>

#include "dirpg/action_set.hpp"
#include "dirpg/environment.hpp"
#include "dirpg/policy.hpp"
#include "dirpg/rng.hpp"

namespace dirpg {

enum class PriorityMode { gumbel_only, direct_bound };

struct PriorityConfig {
  PriorityMode mode = PriorityMode::gumbel_only;
  double epsilon = 1.0;
  /// Weight on the return-to-go bound, in [0, 1]; 1 is A* sampling.
  double alpha = 0.0;
  /// Drop popped regions whose admissible bound cannot beat the best direct
  /// objective found so far. Requires epsilon >= 0.
  bool prune = false;
};

/// Set of trajectories that start with the prefix ending at `node` and take
/// their next action from `allowed`.
struct Region {
  NoiseTree::NodeId node = NoiseTree::kRoot;
  ActionSet allowed;
  double gumbel = 0.0;          // max perturbed log-probability inside the region
  double accrued_return = 0.0;  // reward collected along the prefix
  double bound_to_go = 0.0;     // admissible bound on reward after the prefix
  double log_prob = 0.0;        // log of the policy mass of the region
};

struct YieldedTrajectory {
  Prefix trajectory;
  NoiseTree::NodeId node = NoiseTree::kRoot;
  double gumbel = 0.0;
  double ret = 0.0;
  double direct_objective = 0.0;  // gumbel + epsilon * ret
  double log_prob = 0.0;
};

/// gumbel_only: the region's Gumbel. direct_bound: G + eps * (L + alpha * U).
double priority_of(const Region& region, const PriorityConfig& cfg);

/// True iff G + eps * (L + U) <= best (ties are pruned).
bool should_prune(const Region& region, double best_direct_objective, const PriorityConfig& cfg);

/// log of the policy mass of `region`, recomputed from the root.
double region_log_prob(const PolicyParams& params, const NoiseTree& tree, const Region& region);

struct SplitResult {
  Region inherit;                  // prefix + a, all legal next actions, parent's Gumbel
  std::optional<Region> truncated; // prefix, allowed \ {a}, truncated Gumbel; none if empty
};

/// Splits `parent` on `sampled_action`, materializing the child prefix.
/// `rng` supplies the truncated Gumbel draw. Throws ContractViolation when the
/// action is not in parent.allowed.
SplitResult split_region(const PolicyParams& params, NoiseTree& tree, const Region& parent,
                         ActionId sampled_action, Rng& rng);

/// Root region of a noise tree with its Gumbel drawn from Gumbel(0).
Region root_region(const NoiseTree& tree, Rng& rng);

/// Lazy top-down sampler over the trajectory tree of one noise tree. Yields
/// complete trajectories with their direct objectives. Regions are popped in
/// descending Gumbel order until the first yield (so the first yield is the
/// policy sample and costs exactly one interaction per step), then by the
/// configured priority.
///
/// Every region draws its randomness from a stream addressed by
/// (gumbel_seed, prefix, allowed set), so the realized Gumbel process does not
/// depend on the expansion order or on pruning.
///
/// Holds references to `params` and `tree`; both must outlive the generator.
class TrajectoryGenerator {
 public:
  enum class Status { running, yielded, exhausted, budget_exceeded };

  TrajectoryGenerator(const PolicyParams& params, NoiseTree& tree, std::uint64_t gumbel_seed,
                      PriorityConfig cfg);
  TrajectoryGenerator(const PolicyParams& params, NoiseTree& tree, Rng& rng, PriorityConfig cfg)
      : TrajectoryGenerator(params, tree, rng(), cfg) {}

  /// Next trajectory, or nullopt when the queue is exhausted or the next
  /// expansion would exceed the interaction limit (see status()).
  std::optional<YieldedTrajectory> next();

  /// Caps the noise tree's total interaction counter. An expansion that
  /// needs a new environment step is refused once the counter reaches it.
  void set_interaction_limit(std::size_t max_total_interactions) { limit_ = max_total_interactions; }
  /// One JSON line per expansion: prefix, allowed, gumbel, priority, pruned.
  void set_trace(std::ostream* trace) { trace_ = trace; }

  Status status() const { return status_; }
  std::size_t expansions() const { return expansions_; }
  std::size_t pruned() const { return pruned_; }
  std::size_t yields() const { return yields_; }
  std::size_t queue_size() const { return heap_.size(); }
  double best_direct_objective() const { return best_; }
  const PriorityConfig& config() const { return cfg_; }

 private:
  struct Entry {
    double priority;
    std::uint64_t seq;
    Region region;
  };

  void push(const Region& region);
  void reprioritize();
  double current_priority(const Region& region) const;
  void ensure_node(NoiseTree::NodeId node);
  std::span<const double> node_log_probs(NoiseTree::NodeId node) const;
  Region make_region(NoiseTree::NodeId node, ActionSet allowed, double gumbel, double log_prob) const;
  void trace_expansion(const Region& region, double priority, bool pruned) const;

  const PolicyParams& params_;
  NoiseTree& tree_;
  std::uint64_t gumbel_seed_;
  PriorityConfig cfg_;
  std::vector<Entry> heap_;
  std::uint64_t next_seq_ = 0;
  bool switched_ = false;
  Status status_ = Status::running;
  std::size_t limit_ = static_cast<std::size_t>(-1);
  std::size_t expansions_ = 0;
  std::size_t pruned_ = 0;
  std::size_t yields_ = 0;
  double best_;
  std::ostream* trace_ = nullptr;

  // Per-node caches, indexed by NodeId (theta is fixed for a generator's life).
  std::vector<char> node_ready_;
  std::vector<double> prefix_log_prob_;
  std::vector<double> log_probs_;  // num_actions per node
};

}  // namespace dirpg
