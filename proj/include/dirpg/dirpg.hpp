#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <vector>

#include "dirpg/environment.hpp"
#include "dirpg/optimizer.hpp"
#include "dirpg/policy.hpp"
#include "dirpg/trajectory_generator.hpp"
#include "dirpg/training.hpp"

namespace dirpg {

struct SearchBudget {
  /// Environment interactions per gradient estimate, including the T spent
  /// on the policy sample. Must be at least the horizon.
  std::size_t max_interactions = 100;
  /// Stop at the first trajectory whose direct objective beats the sample's.
  bool terminate_on_first_improvement = false;
};

struct GradientEstimate {
  std::vector<double> grad;  // shaped like theta
  Prefix t_opt;
  Prefix t_dir;
  bool improved = false;
  double d_opt = 0.0;
  double d_dir = 0.0;
  double gumbel_opt = 0.0;
  double return_opt = 0.0;
  double return_dir = 0.0;
  /// Return of the first yielded trajectory that the environment accepts as
  /// a valid outcome (the sample itself outside the spanning-tree bandit).
  std::optional<double> predicted_return;
  std::size_t interactions = 0;         // total used for this estimate
  std::size_t search_interactions = 0;  // after the policy sample
  std::size_t yields = 0;
  std::size_t pruned = 0;
};

/// (1/eps) (grad log Pi(t_dir) - grad log Pi(t_opt)), or without the second
/// term when `control_variate` is false. Uses the given noise tree, whose
/// interaction counter keeps counting across calls.
GradientEstimate direct_gradient(const PolicyParams& params, NoiseTree& tree, std::uint64_t gumbel_seed,
                                 double epsilon, const SearchBudget& budget, PriorityConfig priority,
                                 bool control_variate = true, std::ostream* trace = nullptr);

/// Fresh noise tree and Gumbel stream, both derived from `seed`.
GradientEstimate direct_gradient(const PolicyParams& params, const Environment& env, std::uint64_t seed,
                                 double epsilon, const SearchBudget& budget,
                                 const PriorityConfig& priority = {});

/// The ablation that drops the grad log Pi(t_opt) term.
GradientEstimate direct_gradient_no_cv(const PolicyParams& params, const Environment& env,
                                       std::uint64_t seed, double epsilon, const SearchBudget& budget,
                                       const PriorityConfig& priority = {});

/// Noise-tree and Gumbel seeds for one training episode.
struct EpisodeSeeds {
  std::uint64_t noise;
  std::uint64_t gumbel;
};
EpisodeSeeds episode_seeds(std::uint64_t run_seed, std::size_t episode);

struct DirpgSettings {
  double epsilon = 1.0;
  PriorityConfig priority;
  SearchBudget budget;
  bool control_variate = true;
  OptimizerKind optimizer = OptimizerKind::adaptive_moment;
  double learning_rate = 0.001;
  std::size_t episodes = 1000;
};

/// One gradient estimate and one ascent step per episode.
TrainResult train_dirpg(const Environment& env, PolicyParams init, const DirpgSettings& settings,
                        std::uint64_t seed, const ProgressFn& progress = {}, std::ostream* trace = nullptr);

}  // namespace dirpg
