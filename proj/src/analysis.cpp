#include "dirpg/analysis.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>
#include <stdexcept>

#include "dirpg/envs/sequence_env.hpp"
#include "dirpg/errors.hpp"
#include "dirpg/gumbel.hpp"

namespace dirpg {

void require_enumerable(const Environment& env) {
  const std::size_t a = env.num_actions(), t = env.horizon();
  std::size_t count = 1;
  for (std::size_t i = 0; i < t && count <= 4096; ++i) count *= a;
  if (a > 4 || t > 6 || count > 4096) {
    throw std::invalid_argument("environment too large to enumerate: |A| = " + std::to_string(a) +
                                ", T = " + std::to_string(t));
  }
}

namespace {

void enumerate_from(const PolicyParams& params, NoiseTree& tree, NoiseTree::NodeId node, double log_prob,
                    std::vector<EnumeratedTrajectory>& out) {
  const StepOutcome& here = tree.outcome(node);
  if (here.terminal) {
    out.push_back({tree.prefix_of(node), node, log_prob, tree.accrued_return(node)});
    return;
  }
  const auto lp = action_log_probs(params, tree.features(node), here.legal);
  for (ActionId a : here.legal) enumerate_from(params, tree, tree.child(node, a), log_prob + lp[a], out);
}

}  // namespace

std::vector<EnumeratedTrajectory> enumerate_trajectories(const PolicyParams& params, NoiseTree& tree) {
  require_enumerable(tree.env());
  std::vector<EnumeratedTrajectory> out;
  enumerate_from(params, tree, NoiseTree::kRoot, 0.0, out);
  return out;
}

double exact_expected_return(const PolicyParams& params, const Environment& env,
                             std::span<const std::uint64_t> noise_seeds) {
  require_enumerable(env);
  if (noise_seeds.empty()) throw std::invalid_argument("exact_expected_return: no noise seeds");
  double total = 0.0;
  for (auto seed : noise_seeds) {
    NoiseTree tree(env, seed);
    for (const auto& t : enumerate_trajectories(params, tree)) total += std::exp(t.log_prob) * t.ret;
  }
  return total / static_cast<double>(noise_seeds.size());
}

std::vector<double> exact_policy_gradient(const PolicyParams& params, const Environment& env,
                                          std::span<const std::uint64_t> noise_seeds) {
  require_enumerable(env);
  if (noise_seeds.empty()) throw std::invalid_argument("exact_policy_gradient: no noise seeds");
  std::vector<double> grad(params.size(), 0.0);
  const double inv = 1.0 / static_cast<double>(noise_seeds.size());
  for (auto seed : noise_seeds) {
    NoiseTree tree(env, seed);
    for (const auto& t : enumerate_trajectories(params, tree)) {
      const double w = std::exp(t.log_prob) * t.ret * inv;
      if (w != 0.0) accumulate_grad_log_prob(params, tree, t.node, w, grad);
    }
  }
  return grad;
}

QuadratureRule gauss_hermite(std::size_t n) {
  if (n == 0) throw std::invalid_argument("gauss_hermite: need at least one node");
  // Golub-Welsch on the Jacobi matrix of the probabilists' Hermite recurrence.
  Eigen::VectorXd diag = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n));
  Eigen::VectorXd sub(static_cast<Eigen::Index>(n > 1 ? n - 1 : 0));
  for (Eigen::Index k = 0; k < sub.size(); ++k) sub[k] = std::sqrt(static_cast<double>(k + 1));
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver;
  solver.computeFromTridiagonal(diag, sub, Eigen::ComputeEigenvectors);
  if (solver.info() != Eigen::Success) throw std::runtime_error("gauss_hermite: eigensolver failed");
  QuadratureRule rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto ii = static_cast<Eigen::Index>(i);
    rule.nodes[i] = solver.eigenvalues()[ii];
    const double v = solver.eigenvectors()(0, ii);
    rule.weights[i] = v * v;
  }
  return rule;
}

namespace {

void check_risk_args(double p, double epsilon, std::size_t nodes) {
  if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("risk objective: p must lie in [0, 1]");
  if (epsilon == 0.0) throw std::invalid_argument("risk objective: epsilon must be non-zero");
  if (nodes < 16) throw std::invalid_argument("risk objective: need at least 16 quadrature nodes");
}

double risk_with_rule(const QuadratureRule& rule, double p, double epsilon, RiskModel model) {
  const double log_miss = std::log1p(-p);
  const double log_hit = std::log(p);
  if (model == RiskModel::controllable) {
    double acc = 0.0;
    for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
      acc += rule.weights[i] * log_add_exp(log_miss, log_hit + epsilon * rule.nodes[i]);
    }
    return acc / epsilon;
  }
  double mgf = kNegInf;
  for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
    mgf = log_add_exp(mgf, std::log(rule.weights[i]) + epsilon * rule.nodes[i]);
  }
  return log_add_exp(log_miss, log_hit + mgf) / epsilon;
}

double first_order(const QuadratureRule& rule, double p, double epsilon, RiskModel model) {
  double m1 = 0.0, m2 = 0.0;
  for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
    m1 += rule.weights[i] * rule.nodes[i];
    m2 += rule.weights[i] * rule.nodes[i] * rule.nodes[i];
  }
  const double mean = p * m1;
  const double variance = model == RiskModel::controllable ? p * (1.0 - p) * m2 : p * m2 - mean * mean;
  return mean + 0.5 * epsilon * variance;
}

}  // namespace

double risk_objective_quadrature(double p, double epsilon, std::size_t nodes, RiskModel model) {
  check_risk_args(p, epsilon, nodes);
  return risk_with_rule(gauss_hermite(nodes), p, epsilon, model);
}

TaylorCheck taylor_risk_check(double p, double epsilon, std::size_t nodes, RiskModel model) {
  check_risk_args(p, epsilon, nodes);
  if (std::abs(epsilon) > 0.1) throw std::invalid_argument("taylor_risk_check: needs |epsilon| <= 0.1");
  const auto rule = gauss_hermite(nodes);
  TaylorCheck out;
  out.objective = risk_with_rule(rule, p, epsilon, model);
  out.first_order_prediction = first_order(rule, p, epsilon, model);
  out.residual = std::abs(out.objective - out.first_order_prediction);
  return out;
}

Lemma1Report lemma1_check(std::span<const double> arm_rewards, std::span<const double> logits, double epsilon,
                          std::size_t trials, std::uint64_t seed) {
  const std::size_t n = arm_rewards.size();
  if (n == 0 || logits.size() != n) throw std::invalid_argument("lemma1_check: rewards and logits must match");
  for (std::size_t i = 1; i < n; ++i) {
    if (!(arm_rewards[i] > arm_rewards[i - 1])) {
      throw std::invalid_argument("lemma1_check: arm rewards must be strictly increasing");
    }
  }
  if (!(epsilon > 0.0)) throw std::invalid_argument("lemma1_check: epsilon must be positive");

  const double norm = log_sum_exp(logits);
  Rng rng = make_rng(seed);
  Lemma1Report report;
  report.trials = trials;
  std::vector<double> g(n);
  std::vector<std::size_t> order(n);
  for (std::size_t trial = 0; trial < trials; ++trial) {
    for (std::size_t i = 0; i < n; ++i) g[i] = sample_gumbel(logits[i] - norm, rng);
    std::size_t i_opt = 0, i_direct = 0;
    for (std::size_t i = 1; i < n; ++i) {
      if (g[i] > g[i_opt]) i_opt = i;
      if (g[i] + epsilon * arm_rewards[i] > g[i_direct] + epsilon * arm_rewards[i_direct]) i_direct = i;
    }
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return g[a] > g[b]; });
    const double d_opt = g[i_opt] + epsilon * arm_rewards[i_opt];
    std::size_t i_approx = i_opt;
    for (std::size_t k = 1; k < n; ++k) {
      if (g[order[k]] + epsilon * arm_rewards[order[k]] > d_opt) {
        i_approx = order[k];
        break;
      }
    }
    if (i_approx != i_opt) ++report.approx_improved;
    if (!(i_direct >= i_approx && i_approx >= i_opt)) {
      ++report.violations;
      if (!report.first_violation) report.first_violation = Lemma1Violation{trial, g, i_opt, i_approx, i_direct};
    }
  }
  return report;
}

StationarityReport stationarity_check(std::span<const double> arm_rewards, std::span<const double> logits,
                                      double epsilon, std::size_t draws, bool exact_search, std::uint64_t seed) {
  if (draws < 2) throw std::invalid_argument("stationarity_check: need at least two draws");
  if (!(epsilon > 0.0)) throw std::invalid_argument("stationarity_check: epsilon must be positive");
  const auto env = make_deterministic_bandit(std::vector<double>(arm_rewards.begin(), arm_rewards.end()));
  PolicyParams params(env.num_actions(), env.feature_dim());
  if (logits.size() != params.num_actions) throw std::invalid_argument("stationarity_check: logits size");
  for (std::size_t a = 0; a < params.num_actions; ++a) params.at(a, 0) = logits[a];

  SearchBudget budget{env.num_actions(), !exact_search};
  std::vector<double> mean(params.size(), 0.0), m2(params.size(), 0.0);
  for (std::size_t i = 0; i < draws; ++i) {
    const auto seeds = episode_seeds(seed, i);
    NoiseTree tree(env, seeds.noise);
    const auto est = direct_gradient(params, tree, seeds.gumbel, epsilon, budget, PriorityConfig{});
    for (std::size_t c = 0; c < params.size(); ++c) {
      const double delta = est.grad[c] - mean[c];
      mean[c] += delta / static_cast<double>(i + 1);
      m2[c] += delta * (est.grad[c] - mean[c]);
    }
  }
  StationarityReport r;
  r.mean_grad = mean;
  r.std_error.resize(params.size());
  double se2 = 0.0, norm2 = 0.0;
  for (std::size_t c = 0; c < params.size(); ++c) {
    const double var = m2[c] / static_cast<double>(draws - 1);
    r.std_error[c] = std::sqrt(var / static_cast<double>(draws));
    se2 += var / static_cast<double>(draws);
    norm2 += mean[c] * mean[c];
  }
  r.norm = std::sqrt(norm2);
  r.norm_se = std::sqrt(se2);
  r.stationary = r.norm <= 3.0 * r.norm_se;
  return r;
}

InformativeGradientReport informative_gradient_probability(std::size_t num_actions, std::size_t horizon,
                                                           double epsilon, double m, std::size_t trials,
                                                           std::uint64_t seed, std::size_t reinforce_k) {
  if (trials == 0) throw std::invalid_argument("informative_gradient_probability: trials must be positive");
  std::size_t count = 1;
  for (std::size_t t = 0; t < horizon && count <= 4096; ++t) count *= num_actions;
  if (count > 4096) throw std::invalid_argument("informative_gradient_probability: |A|^T too large for exact search");
  const std::size_t target = count - 1;
  const auto env = make_sparse_reward_env(num_actions, horizon, target, m);
  const auto params = PolicyParams::zeros_for(env);
  PriorityConfig cfg;
  cfg.epsilon = epsilon;

  std::size_t hits = 0;
  for (std::size_t i = 0; i < trials; ++i) {
    const auto seeds = episode_seeds(seed, i);
    NoiseTree tree(env, seeds.noise);
    TrajectoryGenerator gen(params, tree, seeds.gumbel, cfg);
    double best = kNegInf;
    NoiseTree::NodeId best_node = NoiseTree::kRoot;
    while (auto y = gen.next()) {
      if (y->direct_objective > best) {
        best = y->direct_objective;
        best_node = y->node;
      }
    }
    if (env.code_of(tree.prefix_of(best_node)) == target) ++hits;
  }
  InformativeGradientReport r;
  r.trials = trials;
  r.empirical = static_cast<double>(hits) / static_cast<double>(trials);
  const double em = std::exp(epsilon * m);
  r.closed_form = em / (em + static_cast<double>(count - 1));
  r.standard_error = std::sqrt(r.closed_form * (1.0 - r.closed_form) / static_cast<double>(trials));
  r.reinforce_rate = std::min(1.0, static_cast<double>(reinforce_k) / static_cast<double>(count));
  return r;
}

double update_variance(const PolicyParams& params, const Environment& env, double epsilon, std::size_t n,
                       bool with_cv, const SearchBudget& budget, const PriorityConfig& priority,
                       std::uint64_t seed) {
  if (n < 2) throw std::invalid_argument("update_variance: need n >= 2");
  std::vector<double> mean(params.size(), 0.0), m2(params.size(), 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    const auto seeds = episode_seeds(seed, i);
    NoiseTree tree(env, seeds.noise);
    const auto est = direct_gradient(params, tree, seeds.gumbel, epsilon, budget, priority, with_cv);
    for (std::size_t c = 0; c < params.size(); ++c) {
      const double delta = est.grad[c] - mean[c];
      mean[c] += delta / static_cast<double>(i + 1);
      m2[c] += delta * (est.grad[c] - mean[c]);
    }
  }
  double total = 0.0;
  for (double v : m2) total += v / static_cast<double>(n - 1);
  return total;
}

nlohmann::json to_json(const Lemma1Report& report) {
  nlohmann::json j{{"trials", report.trials},
                   {"violations", report.violations},
                   {"approx_improved", report.approx_improved},
                   {"passed", report.passed()}};
  if (report.first_violation) {
    const auto& v = *report.first_violation;
    j["first_violation"] = {{"trial", v.trial},   {"gumbels", v.gumbels},   {"i_opt", v.i_opt},
                            {"i_approx", v.i_approx}, {"i_direct", v.i_direct}};
  }
  return j;
}

nlohmann::json to_json(const StationarityReport& report) {
  return {{"mean_grad", report.mean_grad},
          {"std_error", report.std_error},
          {"norm", report.norm},
          {"norm_se", report.norm_se},
          {"stationary", report.stationary}};
}

nlohmann::json to_json(const InformativeGradientReport& report) {
  return {{"empirical", report.empirical},
          {"standard_error", report.standard_error},
          {"closed_form", report.closed_form},
          {"reinforce_rate", report.reinforce_rate},
          {"trials", report.trials}};
}

nlohmann::json to_json(const TaylorCheck& check) {
  return {{"objective", check.objective},
          {"first_order_prediction", check.first_order_prediction},
          {"residual", check.residual}};
}

void write_risk_sweep(std::ostream& out, std::span<const double> ps, std::span<const double> epsilons,
                      std::size_t nodes) {
  const auto rule = gauss_hermite(nodes);
  out << "p,epsilon,objective,joint_objective,first_order_prediction,residual\n";
  for (double p : ps) {
    for (double eps : epsilons) {
      check_risk_args(p, eps, nodes);
      const double obj = risk_with_rule(rule, p, eps, RiskModel::controllable);
      const double joint = risk_with_rule(rule, p, eps, RiskModel::joint);
      const double pred = first_order(rule, p, eps, RiskModel::controllable);
      out << format_number(p) << ',' << format_number(eps) << ',' << format_number(obj) << ','
          << format_number(joint) << ',' << format_number(pred) << ',' << format_number(std::abs(obj - pred))
          << '\n';
    }
  }
}

}  // namespace dirpg
