#include "dirpg/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "dirpg/dirpg.hpp"
#include "dirpg/errors.hpp"

namespace dirpg {

Rollout sample_rollout(const PolicyParams& params, NoiseTree& tree, Rng& rng) {
  Rollout r;
  auto node = NoiseTree::kRoot;
  while (!tree.outcome(node).terminal) {
    const auto& out = tree.outcome(node);
    const ActionId a = sample_action(params, tree.features(node), out.legal, rng);
    node = tree.child(node, a);
    r.rewards.push_back(tree.outcome(node).reward);
    r.ret += tree.outcome(node).reward;
  }
  r.terminal = node;
  return r;
}

namespace {

std::vector<Rollout> rollouts_in(const PolicyParams& params, NoiseTree& tree, Rng& rng, std::size_t k) {
  std::vector<Rollout> out;
  out.reserve(k);
  for (std::size_t i = 0; i < k; ++i) out.push_back(sample_rollout(params, tree, rng));
  return out;
}

std::size_t total_steps(const std::vector<Rollout>& rs) {
  std::size_t n = 0;
  for (const auto& r : rs) n += r.rewards.size();
  return n;
}

double mean_return(const std::vector<Rollout>& rs) {
  double s = 0.0;
  for (const auto& r : rs) s += r.ret;
  return s / static_cast<double>(rs.size());
}

ScoreEstimate reinforce_in(const PolicyParams& params, NoiseTree& tree, Rng& rng, std::size_t k,
                           ReinforceVariant variant) {
  if (k == 0) throw ContractViolation("reinforce_gradient: k must be positive");
  const auto rs = rollouts_in(params, tree, rng, k);
  ScoreEstimate est{std::vector<double>(params.size(), 0.0), mean_return(rs), total_steps(rs)};
  const double inv_k = 1.0 / static_cast<double>(k);

  if (variant == ReinforceVariant::trajectory) {
    for (const auto& r : rs) {
      if (r.ret != 0.0) accumulate_grad_log_prob(params, tree, r.terminal, inv_k * r.ret, est.grad);
    }
    return est;
  }

  // Per-step average reward of every rollout, for leave-one-out baselines.
  std::vector<double> step_avg(k);
  double step_avg_sum = 0.0;
  for (std::size_t i = 0; i < k; ++i) {
    step_avg[i] = rs[i].rewards.empty() ? 0.0 : rs[i].ret / static_cast<double>(rs[i].rewards.size());
    step_avg_sum += step_avg[i];
  }
  for (std::size_t i = 0; i < k; ++i) {
    const double baseline = k > 1 ? (step_avg_sum - step_avg[i]) / static_cast<double>(k - 1) : 0.0;
    double to_go = 0.0;
    auto node = rs[i].terminal;
    for (std::size_t t = rs[i].rewards.size(); t-- > 0; node = tree.parent(node)) {
      to_go += rs[i].rewards[t];
      const double coeff = to_go - baseline;
      if (coeff != 0.0) accumulate_step_score(params, tree, node, inv_k * coeff, est.grad);
    }
  }
  return est;
}

ScoreEstimate cem_in(const PolicyParams& params, NoiseTree& tree, Rng& rng, std::size_t n, std::size_t elite) {
  if (elite == 0 || elite > n) throw ContractViolation("cem_update: need 1 <= elite <= n");
  const auto rs = rollouts_in(params, tree, rng, n);
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return rs[a].ret > rs[b].ret; });
  ScoreEstimate est{std::vector<double>(params.size(), 0.0), mean_return(rs), total_steps(rs)};
  for (std::size_t i = 0; i < elite; ++i) {
    accumulate_grad_log_prob(params, tree, rs[order[i]].terminal, 1.0 / static_cast<double>(elite), est.grad);
  }
  return est;
}

template <class Estimate>
TrainResult train_score(const Environment& env, PolicyParams init, const ScoreSettings& settings,
                        std::uint64_t seed, const ProgressFn& progress, Estimate&& estimate) {
  TrainResult result{std::move(init), {}};
  Optimizer opt(settings.optimizer, settings.learning_rate, result.params.size());
  std::size_t total = 0;
  const double nan = std::numeric_limits<double>::quiet_NaN();
  for (std::size_t ep = 0; ep < settings.episodes; ++ep) {
    const auto seeds = episode_seeds(seed, ep);
    NoiseTree tree(env, seeds.noise);
    Rng rng(seeds.gumbel);
    const ScoreEstimate est = estimate(result.params, tree, rng);
    opt.ascend(result.params.theta, est.grad);
    total += est.steps;
    EpisodeRecord rec{ep, total, est.mean_return, nan, nan, 0, false};
    result.records.push_back(rec);
    if (progress && !progress(rec)) break;
  }
  return result;
}

}  // namespace

ScoreEstimate reinforce_gradient(const PolicyParams& params, const Environment& env, std::size_t k,
                                 ReinforceVariant variant, std::uint64_t seed) {
  const auto seeds = episode_seeds(seed, 0);
  NoiseTree tree(env, seeds.noise);
  Rng rng(seeds.gumbel);
  return reinforce_in(params, tree, rng, k, variant);
}

ScoreEstimate cem_update(const PolicyParams& params, const Environment& env, std::size_t n, std::size_t elite,
                         std::uint64_t seed) {
  const auto seeds = episode_seeds(seed, 0);
  NoiseTree tree(env, seeds.noise);
  Rng rng(seeds.gumbel);
  return cem_in(params, tree, rng, n, elite);
}

TrainResult train_reinforce(const Environment& env, PolicyParams init, ReinforceVariant variant,
                            const ScoreSettings& settings, std::uint64_t seed, const ProgressFn& progress) {
  return train_score(env, std::move(init), settings, seed, progress,
                     [&](const PolicyParams& p, NoiseTree& tree, Rng& rng) {
                       return reinforce_in(p, tree, rng, settings.rollouts, variant);
                     });
}

TrainResult train_cem(const Environment& env, PolicyParams init, const ScoreSettings& settings,
                      std::uint64_t seed, const ProgressFn& progress) {
  return train_score(env, std::move(init), settings, seed, progress,
                     [&](const PolicyParams& p, NoiseTree& tree, Rng& rng) {
                       return cem_in(p, tree, rng, settings.rollouts, settings.elite);
                     });
}

std::vector<double> ucb_scores(const UcbStats& stats) {
  std::vector<double> u(stats.mean_reward.size());
  const double bonus = 1.5 * std::log(static_cast<double>(stats.time));
  for (std::size_t e = 0; e < u.size(); ++e) {
    u[e] = stats.pull_count[e] == 0 ? std::numeric_limits<double>::infinity()
                                    : stats.mean_reward[e] + bonus / static_cast<double>(stats.pull_count[e]);
  }
  return u;
}

std::vector<std::size_t> ucb_select_tree(const UcbStats& stats, const Graph& graph) {
  if (stats.mean_reward.size() != graph.num_edges()) throw ContractViolation("ucb_select_tree: stats size mismatch");
  return max_spanning_tree(graph, ucb_scores(stats));
}

void ucb_update(UcbStats& stats, const Graph& graph, std::span<const std::size_t> tree,
                std::span<const double> edge_rewards, BanditFeedback feedback) {
  double tree_reward = 0.0;
  for (auto e : tree) tree_reward += edge_rewards[e];
  const double shared = tree_reward / static_cast<double>(graph.num_vertices - 1);
  for (auto e : tree) {
    const double r = feedback == BanditFeedback::semi ? edge_rewards[e] : shared;
    const auto c = ++stats.pull_count[e];
    stats.mean_reward[e] += (r - stats.mean_reward[e]) / static_cast<double>(c);
  }
  ++stats.time;
}

TrainResult run_ucb(const SpanningTreeBandit& env, BanditFeedback feedback, std::size_t episodes,
                    std::uint64_t seed, const ProgressFn& progress) {
  const Graph& graph = env.graph();
  UcbStats stats(graph.num_edges());
  TrainResult result;
  const double nan = std::numeric_limits<double>::quiet_NaN();
  for (std::size_t ep = 0; ep < episodes; ++ep) {
    NoiseTree tree(env, episode_seeds(seed, ep).noise);
    const auto rewards = tree.episode_noise();
    const auto chosen = ucb_select_tree(stats, graph);
    double ret = 0.0;
    for (auto e : chosen) ret += rewards[e];
    ucb_update(stats, graph, chosen, rewards, feedback);
    EpisodeRecord rec{ep, ep + 1, ret, nan, nan, 0, false};
    result.records.push_back(rec);
    if (progress && !progress(rec)) break;
  }
  return result;
}

}  // namespace dirpg
