#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "dirpg/config.hpp"
#include "dirpg/training.hpp"

namespace dirpg {

struct RunOptions {
  bool trace = false;  // write a search-trace JSONL per dirpg seed
  bool quiet = false;
  std::ostream* log = nullptr;  // progress lines; nullptr means std::cerr
};

/// Trains one seed with the configured algorithm.
TrainResult run_single(const ExperimentConfig& cfg, const Environment& env, std::uint64_t seed,
                       std::ostream* trace = nullptr, const ProgressFn& progress = {});

struct TrainOutputs {
  std::vector<std::string> files;
  std::vector<TrainResult> results;  // one per seed, in config order
};

/// Writes <out_dir>/<algorithm>_seed<k>.csv per seed, a policy checkpoint per
/// seed for policy-based algorithms, and <out_dir>/<algorithm>_merged.csv.
TrainOutputs run_train(const ExperimentConfig& cfg, const RunOptions& options = {});

/// Moving-average return on a shared interaction grid. Columns:
/// interactions,mean_return,seed_<k>... Each seed contributes its moving
/// average at the last episode finished by that interaction count (nan
/// before its first episode).
void write_merged_csv(std::ostream& out, std::span<const std::uint64_t> seeds,
                      std::span<const TrainResult> results, std::size_t window, std::size_t report_every);

/// Trains every value of `param` and writes <out_dir>/sweep_<param>.csv with
/// one summary row per value: the final moving-average return averaged over
/// seeds and, on DeepSea, the final policy's P(LLLL) and P(RRRR). Returns the
/// table path.
std::string run_sweep(const ExperimentConfig& cfg, const std::string& param, std::span<const std::string> values,
                      const RunOptions& options = {});

/// Probability of the all-`action` trajectory on DeepSea.
double deep_sea_constant_path_prob(const PolicyParams& params, int size, ActionId action);

/// Writes `content` to a sibling temporary file and renames it over `path`.
void write_file_atomic(const std::string& path, const std::string& content);

}  // namespace dirpg
