#include "dirpg/environment.hpp"

#include <sstream>

#include "dirpg/errors.hpp"

namespace dirpg {

namespace {
constexpr std::uint64_t kEpisodeStream = 0x45504953ULL;  // "EPIS"
}

double Environment::bound_to_go(const EnvState& /*state*/, std::size_t depth,
                                std::span<const double> episode_noise) const {
  const std::size_t remaining = depth >= horizon() ? 0 : horizon() - depth;
  return static_cast<double>(remaining) * max_step_reward(episode_noise);
}

NoiseTree::NoiseTree(const Environment& env, std::uint64_t master_seed)
    : env_(&env), master_seed_(master_seed) {
  Rng episode_rng(hash_combine(master_seed, kEpisodeStream));
  episode_noise_ = env.sample_episode_noise(episode_rng);
  Node root;
  root.hash = mix64(master_seed);
  root.outcome = env.initial(episode_noise_);
  root.outcome.reward = 0.0;
  finish_node(root);
  nodes_.push_back(std::move(root));
  features_.resize(env.feature_dim());
  env.features(nodes_[0].outcome.state, std::span<double>(features_.data(), env.feature_dim()));
}

void NoiseTree::finish_node(Node& node) {
  if (node.depth >= env_->horizon()) node.outcome.terminal = true;
  if (node.outcome.terminal) node.outcome.legal = ActionSet();
  node.children.assign(env_->num_actions(), kNone);
}

NoiseTree::NodeId NoiseTree::find_child(NodeId parent, ActionId action) const {
  const auto& children = nodes_[parent].children;
  return action < children.size() ? children[action] : kNone;
}

NoiseTree::NodeId NoiseTree::child(NodeId parent, ActionId action) {
  if (parent >= nodes_.size()) throw ContractViolation("NoiseTree::child: unknown node");
  if (const NodeId hit = find_child(parent, action); hit != kNone) return hit;
  const Node& p = nodes_[parent];
  if (!p.outcome.legal.contains(action)) {
    throw ContractViolation("illegal action " + std::to_string(action) + " at prefix " +
                            format_prefix(prefix_of(parent)));
  }
  Node node;
  node.parent = parent;
  node.action = action;
  node.depth = p.depth + 1;
  node.hash = hash_combine(p.hash, action);
  Rng node_rng(node.hash);
  node.outcome = env_->step(p.outcome.state, action, episode_noise_, node_rng);
  node.accrued = p.accrued + node.outcome.reward;
  finish_node(node);

  const auto id = static_cast<NodeId>(nodes_.size());
  nodes_.push_back(std::move(node));
  nodes_[parent].children[action] = id;
  const std::size_t dim = env_->feature_dim();
  features_.resize(features_.size() + dim);
  env_->features(nodes_[id].outcome.state, std::span<double>(features_.data() + id * dim, dim));
  ++interactions_;
  return id;
}

std::span<const double> NoiseTree::features(NodeId id) const {
  const std::size_t dim = env_->feature_dim();
  return {features_.data() + static_cast<std::size_t>(id) * dim, dim};
}

std::optional<NoiseTree::NodeId> NoiseTree::find(std::span<const ActionId> prefix) const {
  NodeId id = kRoot;
  for (ActionId a : prefix) {
    id = find_child(id, a);
    if (id == kNone) return std::nullopt;
  }
  return id;
}

NoiseTree::NodeId NoiseTree::node_at(std::span<const ActionId> prefix) const {
  if (auto id = find(prefix)) return *id;
  throw ContractViolation("prefix " + format_prefix(prefix) + " is not materialized");
}

NoiseTree::NodeId NoiseTree::materialize(std::span<const ActionId> prefix) {
  NodeId id = kRoot;
  for (ActionId a : prefix) id = child(id, a);
  return id;
}

const StepOutcome& NoiseTree::step(std::span<const ActionId> prefix, ActionId action) {
  return nodes_[child(node_at(prefix), action)].outcome;
}

Prefix NoiseTree::prefix_of(NodeId id) const {
  Prefix out(nodes_[id].depth);
  for (std::size_t i = out.size(); i > 0; --i) {
    out[i - 1] = nodes_[id].action;
    id = nodes_[id].parent;
  }
  return out;
}

NoiseTree reset(const Environment& env, std::uint64_t seed) { return NoiseTree(env, seed); }

double return_of(const NoiseTree& tree, std::span<const ActionId> trajectory) {
  const auto id = tree.node_at(trajectory);
  if (!tree.outcome(id).terminal) {
    throw ContractViolation("return_of: trajectory " + format_prefix(trajectory) +
                            " does not end in a terminal state");
  }
  return tree.accrued_return(id);
}

double heuristic_upper_bound(const NoiseTree& tree, NoiseTree::NodeId node) {
  const auto& out = tree.outcome(node);
  if (out.terminal) return 0.0;
  return tree.env().bound_to_go(out.state, tree.depth(node), tree.episode_noise());
}

double heuristic_upper_bound(const NoiseTree& tree, std::span<const ActionId> prefix) {
  return heuristic_upper_bound(tree, tree.node_at(prefix));
}

std::string format_prefix(std::span<const ActionId> prefix) {
  std::ostringstream os;
  os << '[';
  for (std::size_t i = 0; i < prefix.size(); ++i) os << (i ? "," : "") << prefix[i];
  os << ']';
  return os.str();
}

}  // namespace dirpg
