#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "dirpg/action_set.hpp"
#include "dirpg/environment.hpp"
#include "dirpg/rng.hpp"

namespace dirpg {

/// Linear-softmax policy parameters: one row of `feature_dim` weights per
/// action, score(a | s) = theta_a . phi(s).
struct PolicyParams {
  std::size_t num_actions = 0;
  std::size_t feature_dim = 0;
  std::vector<double> theta;

  PolicyParams() = default;
  PolicyParams(std::size_t actions, std::size_t features)
      : num_actions(actions), feature_dim(features), theta(actions * features, 0.0) {}

  static PolicyParams zeros_for(const Environment& env) {
    return PolicyParams(env.num_actions(), env.feature_dim());
  }

  double& at(std::size_t action, std::size_t feature) { return theta[action * feature_dim + feature]; }
  double at(std::size_t action, std::size_t feature) const { return theta[action * feature_dim + feature]; }
  std::span<const double> row(std::size_t action) const {
    return {theta.data() + action * feature_dim, feature_dim};
  }
  std::size_t size() const { return theta.size(); }
};

/// Masked log-softmax: -inf for actions outside `legal`. Throws
/// ContractViolation when `legal` is empty.
std::vector<double> action_log_probs(const PolicyParams& params, std::span<const double> features,
                                     ActionSet legal);
/// Same, written into `out` (size num_actions) without allocating.
void action_log_probs_into(const PolicyParams& params, std::span<const double> features,
                           ActionSet legal, std::span<double> out);

ActionId sample_action(const PolicyParams& params, std::span<const double> features, ActionSet legal,
                       Rng& rng);
/// Categorical draw from masked log-probabilities restricted to `allowed`.
ActionId sample_from_log_probs(std::span<const double> log_probs, ActionSet allowed, Rng& rng);

/// sum_t log pi(a_t | s_t) along a materialized trajectory (or prefix).
double trajectory_log_prob(const PolicyParams& params, const NoiseTree& tree,
                           std::span<const ActionId> trajectory);
double trajectory_log_prob(const PolicyParams& params, const NoiseTree& tree, NoiseTree::NodeId node);

/// Analytic gradient of trajectory_log_prob, shaped like theta.
std::vector<double> grad_log_prob(const PolicyParams& params, const NoiseTree& tree,
                                  std::span<const ActionId> trajectory);
/// out += scale * grad log pi(last action into `node` | its parent's state).
void accumulate_step_score(const PolicyParams& params, const NoiseTree& tree, NoiseTree::NodeId node,
                           double scale, std::span<double> out);
/// out += scale * grad log Pi(path to `node`).
void accumulate_grad_log_prob(const PolicyParams& params, const NoiseTree& tree, NoiseTree::NodeId node,
                              double scale, std::span<double> out);

/// Text checkpoint: a `dirpg-policy 1` header line, then
/// `num_actions <A>`, `feature_dim <F>`, then A*F values one per line in
/// row-major (action-major) order, printed with 17 significant digits.
void save_policy(std::ostream& out, const PolicyParams& params);
PolicyParams load_policy(std::istream& in);
void save_policy(const std::string& path, const PolicyParams& params);
PolicyParams load_policy(const std::string& path);

}  // namespace dirpg
