#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "dirpg/dirpg.hpp"
#include "dirpg/envs/multi_room_grid.hpp"
#include "dirpg/envs/spanning_tree_bandit.hpp"
#include "dirpg/optimizer.hpp"
#include "dirpg/trajectory_generator.hpp"

namespace dirpg {

enum class Algorithm { dirpg, reinforce, reinforce_action, cem, ucb_semi, ucb_full };

Algorithm parse_algorithm(const std::string& name);
std::string to_string(Algorithm algorithm);

struct EnvConfig {
  std::string name = "deep_sea";  // deep_sea | multi_room_grid | spanning_tree_bandit
  int size = 5;
  MultiRoomConfig grid;
  std::string graph_path;  // edge list; empty means a random graph
  int graph_vertices = 6;
  double graph_edge_prob = 0.3;
  std::uint64_t graph_seed = 0;
  LegalityRule legality = LegalityRule::count;
};

/// Experiment description read from an INI file with sections
/// [experiment], [env], [dirpg], [optimizer] and [baseline]. Keys are
/// addressed as `section.key`; see configs/ for annotated examples.
struct ExperimentConfig {
  EnvConfig env;
  Algorithm algorithm = Algorithm::dirpg;
  std::optional<double> epsilon;
  double alpha = 0.0;
  PriorityMode priority = PriorityMode::gumbel_only;
  bool prune = false;
  SearchBudget budget;
  bool control_variate = true;
  std::size_t episodes = 1000;
  double learning_rate = 0.001;
  OptimizerKind optimizer = OptimizerKind::adaptive_moment;
  std::vector<std::uint64_t> seeds{0};
  std::string out_dir = "out";
  std::size_t ma_window = 100;
  std::size_t report_every = 0;  // merged-CSV grid step in interactions; 0 picks ~200 rows
  std::size_t rollouts = 30;
  std::size_t elite = 2;
  std::string init_policy;  // optional checkpoint
  std::string base_dir;     // directory relative paths resolve against
};

/// Parses and validates. Throws ConfigError naming the offending field.
ExperimentConfig parse_config(std::istream& in, const std::string& base_dir = ".");
ExperimentConfig load_config(const std::string& path);

/// Full `section.key` name for `key`, which may omit the section when that
/// is unambiguous. Throws ConfigError for unknown or ambiguous names.
std::string resolve_config_key(const std::string& key);

/// Sets one field from its text form (no validation across fields).
void set_config_value(ExperimentConfig& cfg, const std::string& key, const std::string& value);

/// Cross-field checks: epsilon present for dirpg, budget >= horizon, UCB
/// only on the bandit, and so on.
void validate(const ExperimentConfig& cfg);

std::unique_ptr<Environment> make_environment(const EnvConfig& env, const std::string& base_dir = ".");

}  // namespace dirpg
