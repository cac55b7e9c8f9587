#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "dirpg/dirpg.hpp"
#include "dirpg/environment.hpp"
#include "dirpg/policy.hpp"
#include "json.hpp"

namespace dirpg {

// ---- exact enumeration -----------------------------------------------------

struct EnumeratedTrajectory {
  Prefix actions;
  NoiseTree::NodeId node = NoiseTree::kRoot;
  double log_prob = 0.0;
  double ret = 0.0;
};

/// Throws std::invalid_argument unless |A| <= 4, T <= 6 and |A|^T <= 4096.
void require_enumerable(const Environment& env);

/// Every legal complete trajectory of the noise tree with its probability.
std::vector<EnumeratedTrajectory> enumerate_trajectories(const PolicyParams& params, NoiseTree& tree);

/// Mean over noise-tree seeds of sum_tau Pi(tau) R(tau).
double exact_expected_return(const PolicyParams& params, const Environment& env,
                             std::span<const std::uint64_t> noise_seeds);

/// Mean over noise-tree seeds of sum_tau Pi(tau) R(tau) grad log Pi(tau).
std::vector<double> exact_policy_gradient(const PolicyParams& params, const Environment& env,
                                          std::span<const std::uint64_t> noise_seeds);

// ---- risk objective --------------------------------------------------------

/// Probabilists' Gauss-Hermite rule: E[f(z)], z ~ N(0,1), ~ sum_i w_i f(x_i).
struct QuadratureRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};
QuadratureRule gauss_hermite(std::size_t n);

/// Gaussian-choice problem: reward z ~ N(0,1) with probability p, else 0.
/// controllable: E_z[(1/eps) log((1-p) + p e^{eps z})], the log taken per
///   environment realization so only policy randomness is risk-weighted.
/// joint: (1/eps) log E[e^{eps R}] over policy and environment together.
enum class RiskModel { controllable, joint };

double risk_objective_quadrature(double p, double epsilon, std::size_t nodes,
                                 RiskModel model = RiskModel::controllable);

struct TaylorCheck {
  double objective = 0.0;
  double first_order_prediction = 0.0;  // mean + eps/2 * variance term
  double residual = 0.0;
};

/// Variance term: expected conditional variance given the reward draw for the
/// controllable model, total variance for the joint model.
TaylorCheck taylor_risk_check(double p, double epsilon, std::size_t nodes = 64,
                              RiskModel model = RiskModel::controllable);

// ---- search-ordering and stationarity harnesses ---------------------------

struct Lemma1Violation {
  std::size_t trial = 0;
  std::vector<double> gumbels;
  std::size_t i_opt = 0, i_approx = 0, i_direct = 0;
};

struct Lemma1Report {
  std::size_t trials = 0;
  std::size_t violations = 0;
  std::size_t approx_improved = 0;  // trials where i_approx != i_opt
  std::optional<Lemma1Violation> first_violation;
  bool passed() const { return violations == 0; }
};

/// Draws one Gumbel per arm per trial and checks i_direct >= i_approx >= i_opt.
Lemma1Report lemma1_check(std::span<const double> arm_rewards, std::span<const double> logits, double epsilon,
                          std::size_t trials, std::uint64_t seed);

struct StationarityReport {
  std::vector<double> mean_grad;
  std::vector<double> std_error;
  double norm = 0.0;
  double norm_se = 0.0;
  bool stationary = false;  // norm <= 3 * norm_se
};

/// Averages direct_gradient over `draws` Gumbel draws on the deterministic
/// bandit with the given arm logits. exact_search = false stops at the first
/// improvement.
StationarityReport stationarity_check(std::span<const double> arm_rewards, std::span<const double> logits,
                                      double epsilon, std::size_t draws, bool exact_search, std::uint64_t seed);

struct InformativeGradientReport {
  double empirical = 0.0;
  double standard_error = 0.0;
  double closed_form = 0.0;
  double reinforce_rate = 0.0;  // k / |A|^T
  std::size_t trials = 0;
};

/// Uniform policy on the sparse-reward sequence problem with reward m on the
/// last trajectory; frequency that exact search returns it as t_dir.
InformativeGradientReport informative_gradient_probability(std::size_t num_actions, std::size_t horizon,
                                                           double epsilon, double m, std::size_t trials,
                                                           std::uint64_t seed, std::size_t reinforce_k = 2);

/// Sum over coordinates of the empirical variance of n gradient estimates
/// (fresh noise tree and Gumbels per estimate, common across with_cv).
double update_variance(const PolicyParams& params, const Environment& env, double epsilon, std::size_t n,
                       bool with_cv, const SearchBudget& budget, const PriorityConfig& priority,
                       std::uint64_t seed);

// ---- reports ---------------------------------------------------------------

nlohmann::json to_json(const Lemma1Report& report);
nlohmann::json to_json(const StationarityReport& report);
nlohmann::json to_json(const InformativeGradientReport& report);
nlohmann::json to_json(const TaylorCheck& check);

/// CSV columns: p,epsilon,objective,joint_objective,first_order_prediction,residual
void write_risk_sweep(std::ostream& out, std::span<const double> ps, std::span<const double> epsilons,
                      std::size_t nodes);

}  // namespace dirpg
