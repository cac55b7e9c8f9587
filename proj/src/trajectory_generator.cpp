#include "dirpg/trajectory_generator.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include "dirpg/errors.hpp"
#include "dirpg/gumbel.hpp"
#include "json.hpp"

namespace dirpg {

namespace {

constexpr std::uint64_t kRootStream = 0x524f4f54;  // "ROOT"

double masked_log_mass(std::span<const double> log_probs, ActionSet allowed) {
  double acc = kNegInf;
  for (ActionId a : allowed) acc = log_add_exp(acc, log_probs[a]);
  return acc;
}

Region region_at(const NoiseTree& tree, NoiseTree::NodeId node, ActionSet allowed, double gumbel,
                 double log_prob) {
  Region r;
  r.node = node;
  r.allowed = allowed;
  r.gumbel = gumbel;
  r.accrued_return = tree.accrued_return(node);
  r.bound_to_go = heuristic_upper_bound(tree, node);
  r.log_prob = log_prob;
  return r;
}

}  // namespace

double priority_of(const Region& region, const PriorityConfig& cfg) {
  if (cfg.mode == PriorityMode::gumbel_only || cfg.epsilon == 0.0) return region.gumbel;
  double value = region.accrued_return;
  if (cfg.alpha != 0.0) value += cfg.alpha * region.bound_to_go;
  return region.gumbel + cfg.epsilon * value;
}

bool should_prune(const Region& region, double best_direct_objective, const PriorityConfig& cfg) {
  if (cfg.epsilon < 0.0) throw ContractViolation("pruning requires epsilon >= 0");
  double bound = region.gumbel;
  if (cfg.epsilon != 0.0) bound += cfg.epsilon * (region.accrued_return + region.bound_to_go);
  return bound <= best_direct_objective;
}

double region_log_prob(const PolicyParams& params, const NoiseTree& tree, const Region& region) {
  const StepOutcome& out = tree.outcome(region.node);
  const double prefix = trajectory_log_prob(params, tree, region.node);
  if (out.terminal) return prefix;
  const auto lp = action_log_probs(params, tree.features(region.node), out.legal);
  return prefix + masked_log_mass(lp, region.allowed);
}

Region root_region(const NoiseTree& tree, Rng& rng) {
  return region_at(tree, NoiseTree::kRoot, tree.outcome(NoiseTree::kRoot).legal, sample_gumbel(0.0, rng),
                   0.0);
}

SplitResult split_region(const PolicyParams& params, NoiseTree& tree, const Region& parent,
                         ActionId sampled_action, Rng& rng) {
  if (!parent.allowed.contains(sampled_action)) {
    throw ContractViolation("split_region: action " + std::to_string(sampled_action) +
                            " not in the region's allowed set");
  }
  const auto lp =
      action_log_probs(params, tree.features(parent.node), tree.outcome(parent.node).legal);
  const double prefix = trajectory_log_prob(params, tree, parent.node);
  const auto child = tree.child(parent.node, sampled_action);
  SplitResult result{region_at(tree, child, tree.outcome(child).legal, parent.gumbel,
                               prefix + lp[sampled_action]),
                     std::nullopt};
  const ActionSet rest = parent.allowed.without(sampled_action);
  if (!rest.empty()) {
    const double mass = prefix + masked_log_mass(lp, rest);
    result.truncated = region_at(tree, parent.node, rest,
                                 sample_truncated_gumbel(mass, parent.gumbel, rng), mass);
  }
  return result;
}

TrajectoryGenerator::TrajectoryGenerator(const PolicyParams& params, NoiseTree& tree,
                                         std::uint64_t gumbel_seed, PriorityConfig cfg)
    : params_(params), tree_(tree), gumbel_seed_(gumbel_seed), cfg_(cfg), best_(kNegInf) {
  if (params.num_actions != tree.env().num_actions() || params.feature_dim != tree.env().feature_dim()) {
    throw ContractViolation("TrajectoryGenerator: policy shape does not match the environment");
  }
  if (cfg.prune && cfg.epsilon < 0.0) {
    throw ContractViolation("TrajectoryGenerator: pruning requires epsilon >= 0");
  }
  if (cfg.alpha < 0.0 || cfg.alpha > 1.0) {
    throw ContractViolation("TrajectoryGenerator: alpha must lie in [0, 1]");
  }
  ensure_node(NoiseTree::kRoot);
  Rng rng(hash_combine(gumbel_seed_, kRootStream));
  push(make_region(NoiseTree::kRoot, tree_.outcome(NoiseTree::kRoot).legal, sample_gumbel(0.0, rng),
                   0.0));
}

void TrajectoryGenerator::ensure_node(NoiseTree::NodeId node) {
  if (node < node_ready_.size() && node_ready_[node]) return;
  if (node >= node_ready_.size()) {
    const std::size_t n = std::max<std::size_t>(tree_.size(), node + 1);
    node_ready_.resize(n, 0);
    prefix_log_prob_.resize(n, 0.0);
    log_probs_.resize(n * params_.num_actions, kNegInf);
  }
  if (node != NoiseTree::kRoot) {
    const auto parent = tree_.parent(node);
    ensure_node(parent);
    prefix_log_prob_[node] =
        prefix_log_prob_[parent] + log_probs_[parent * params_.num_actions + tree_.action_into(node)];
  } else {
    prefix_log_prob_[node] = 0.0;
  }
  const StepOutcome& out = tree_.outcome(node);
  if (!out.terminal) {
    action_log_probs_into(params_, tree_.features(node), out.legal,
                          std::span<double>(log_probs_).subspan(node * params_.num_actions,
                                                                params_.num_actions));
  }
  node_ready_[node] = 1;
}

std::span<const double> TrajectoryGenerator::node_log_probs(NoiseTree::NodeId node) const {
  return std::span<const double>(log_probs_).subspan(node * params_.num_actions, params_.num_actions);
}

Region TrajectoryGenerator::make_region(NoiseTree::NodeId node, ActionSet allowed, double gumbel,
                                        double log_prob) const {
  return region_at(tree_, node, allowed, gumbel, log_prob);
}

double TrajectoryGenerator::current_priority(const Region& region) const {
  return switched_ ? priority_of(region, cfg_) : region.gumbel;
}

namespace {
struct EntryLess {
  template <class E>
  bool operator()(const E& a, const E& b) const {
    if (a.priority != b.priority) return a.priority < b.priority;
    return a.seq > b.seq;  // earlier insertion wins ties
  }
};
}  // namespace

void TrajectoryGenerator::push(const Region& region) {
  heap_.push_back(Entry{current_priority(region), next_seq_++, region});
  std::push_heap(heap_.begin(), heap_.end(), EntryLess{});
}

void TrajectoryGenerator::reprioritize() {
  for (auto& e : heap_) e.priority = current_priority(e.region);
  std::make_heap(heap_.begin(), heap_.end(), EntryLess{});
}

void TrajectoryGenerator::trace_expansion(const Region& region, double priority, bool pruned) const {
  if (trace_ == nullptr) return;
  nlohmann::json line;
  line["expansion"] = expansions_;
  line["prefix"] = tree_.prefix_of(region.node);
  line["allowed"] = region.allowed.to_vector();
  line["gumbel"] = region.gumbel;
  line["priority"] = priority;
  line["pruned"] = pruned;
  *trace_ << line.dump() << '\n';
}

std::optional<YieldedTrajectory> TrajectoryGenerator::next() {
  while (!heap_.empty()) {
    std::pop_heap(heap_.begin(), heap_.end(), EntryLess{});
    Entry entry = std::move(heap_.back());
    heap_.pop_back();
    const Region& region = entry.region;

    if (cfg_.prune && yields_ > 0 && should_prune(region, best_, cfg_)) {
      ++pruned_;
      trace_expansion(region, entry.priority, true);
      continue;
    }

    Rng rng(hash_combine(hash_combine(gumbel_seed_, tree_.path_hash(region.node)), region.allowed.bits()));
    const auto lp = node_log_probs(region.node);
    const ActionId action = sample_from_log_probs(lp, region.allowed, rng);

    if (tree_.find_child(region.node, action) == NoiseTree::kNone && tree_.interactions() >= limit_) {
      heap_.push_back(std::move(entry));
      std::push_heap(heap_.begin(), heap_.end(), EntryLess{});
      status_ = Status::budget_exceeded;
      return std::nullopt;
    }

    trace_expansion(region, entry.priority, false);
    ++expansions_;
    // Read the parent's cached log-probs before ensure_node(child) can grow the cache.
    const ActionSet rest = region.allowed.without(action);
    const double rest_mass = rest.empty() ? kNegInf : prefix_log_prob_[region.node] + masked_log_mass(lp, rest);
    const auto child = tree_.child(region.node, action);
    ensure_node(child);
    if (!rest.empty()) {
      push(make_region(region.node, rest, sample_truncated_gumbel(rest_mass, region.gumbel, rng), rest_mass));
    }

    const StepOutcome& out = tree_.outcome(child);
    if (!out.terminal) {
      push(make_region(child, out.legal, region.gumbel, prefix_log_prob_[child]));
      continue;
    }

    YieldedTrajectory y;
    y.trajectory = tree_.prefix_of(child);
    y.node = child;
    y.gumbel = region.gumbel;
    y.ret = tree_.accrued_return(child);
    y.direct_objective = region.gumbel + cfg_.epsilon * y.ret;
    y.log_prob = prefix_log_prob_[child];
    best_ = std::max(best_, y.direct_objective);
    ++yields_;
    if (!switched_ && cfg_.mode == PriorityMode::direct_bound) {
      switched_ = true;
      reprioritize();
    }
    status_ = Status::yielded;
    return y;
  }
  status_ = Status::exhausted;
  return std::nullopt;
}

}  // namespace dirpg
