#include "dirpg/dirpg.hpp"

#include <cmath>
#include <ostream>
#include <stdexcept>

#include "dirpg/errors.hpp"

namespace dirpg {

namespace {

void check_request(const Environment& env, double epsilon, const SearchBudget& budget) {
  if (epsilon == 0.0 || !std::isfinite(epsilon)) {
    throw ContractViolation("direct_gradient: epsilon must be finite and non-zero");
  }
  if (budget.max_interactions < env.horizon()) {
    throw ContractViolation("direct_gradient: interaction budget " + std::to_string(budget.max_interactions) +
                            " is below the horizon " + std::to_string(env.horizon()));
  }
}

}  // namespace

EpisodeSeeds episode_seeds(std::uint64_t run_seed, std::size_t episode) {
  const auto base = hash_combine(run_seed, episode);
  return {hash_combine(base, 0x4e4f495345), hash_combine(base, 0x47554d42)};
}

GradientEstimate direct_gradient(const PolicyParams& params, NoiseTree& tree, std::uint64_t gumbel_seed,
                                 double epsilon, const SearchBudget& budget, PriorityConfig priority,
                                 bool control_variate, std::ostream* trace) {
  const Environment& env = tree.env();
  check_request(env, epsilon, budget);
  priority.epsilon = epsilon;

  const std::size_t start = tree.interactions();
  TrajectoryGenerator gen(params, tree, gumbel_seed, priority);
  gen.set_interaction_limit(start + budget.max_interactions);
  gen.set_trace(trace);

  auto first = gen.next();
  if (!first) throw std::runtime_error("direct_gradient: no trajectory within the interaction budget");

  GradientEstimate est;
  est.t_opt = first->trajectory;
  est.d_opt = first->direct_objective;
  est.gumbel_opt = first->gumbel;
  est.return_opt = first->ret;
  const std::size_t after_sample = tree.interactions();

  auto best_node = first->node;
  est.d_dir = est.d_opt;
  est.return_dir = est.return_opt;
  if (env.is_valid_terminal(tree.outcome(first->node).state)) est.predicted_return = first->ret;

  while (auto y = gen.next()) {
    if (!est.predicted_return && env.is_valid_terminal(tree.outcome(y->node).state)) {
      est.predicted_return = y->ret;
    }
    if (y->direct_objective > est.d_dir) {
      est.d_dir = y->direct_objective;
      est.return_dir = y->ret;
      best_node = y->node;
      est.improved = true;
      if (budget.terminate_on_first_improvement) break;
    }
  }
  est.t_dir = tree.prefix_of(best_node);
  est.interactions = tree.interactions() - start;
  est.search_interactions = tree.interactions() - after_sample;
  est.yields = gen.yields();
  est.pruned = gen.pruned();

  est.grad.assign(params.size(), 0.0);
  const double scale = 1.0 / epsilon;
  if (control_variate) {
    if (est.improved) {
      accumulate_grad_log_prob(params, tree, best_node, scale, est.grad);
      accumulate_grad_log_prob(params, tree, first->node, -scale, est.grad);
    }
  } else {
    accumulate_grad_log_prob(params, tree, best_node, scale, est.grad);
  }
  return est;
}

GradientEstimate direct_gradient(const PolicyParams& params, const Environment& env, std::uint64_t seed,
                                 double epsilon, const SearchBudget& budget, const PriorityConfig& priority) {
  check_request(env, epsilon, budget);
  const auto seeds = episode_seeds(seed, 0);
  NoiseTree tree(env, seeds.noise);
  return direct_gradient(params, tree, seeds.gumbel, epsilon, budget, priority, true);
}

GradientEstimate direct_gradient_no_cv(const PolicyParams& params, const Environment& env,
                                       std::uint64_t seed, double epsilon, const SearchBudget& budget,
                                       const PriorityConfig& priority) {
  check_request(env, epsilon, budget);
  const auto seeds = episode_seeds(seed, 0);
  NoiseTree tree(env, seeds.noise);
  return direct_gradient(params, tree, seeds.gumbel, epsilon, budget, priority, false);
}

TrainResult train_dirpg(const Environment& env, PolicyParams init, const DirpgSettings& settings,
                        std::uint64_t seed, const ProgressFn& progress, std::ostream* trace) {
  check_request(env, settings.epsilon, settings.budget);
  TrainResult result{std::move(init), {}};
  Optimizer opt(settings.optimizer, settings.learning_rate, result.params.size());
  std::size_t total = 0;
  result.records.reserve(settings.episodes);
  for (std::size_t ep = 0; ep < settings.episodes; ++ep) {
    const auto seeds = episode_seeds(seed, ep);
    NoiseTree tree(env, seeds.noise);
    if (trace != nullptr) *trace << "{\"episode\":" << ep << "}\n";
    const auto est = direct_gradient(result.params, tree, seeds.gumbel, settings.epsilon, settings.budget,
                                     settings.priority, settings.control_variate, trace);
    opt.ascend(result.params.theta, est.grad);
    total += est.interactions;
    EpisodeRecord rec;
    rec.episode = ep;
    rec.interactions = total;
    rec.return_opt = est.predicted_return.value_or(est.return_opt);
    rec.d_opt = est.d_opt;
    rec.d_dir = est.d_dir;
    rec.search_steps = est.search_interactions;
    rec.improved = est.improved;
    result.records.push_back(rec);
    if (progress && !progress(rec)) break;
  }
  return result;
}

}  // namespace dirpg
