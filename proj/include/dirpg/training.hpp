#pragma once

#include <cstddef>
#include <functional>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "dirpg/policy.hpp"

namespace dirpg {

/// One row of a training log. d_opt / d_dir are NaN for methods without a
/// direct objective.
struct EpisodeRecord {
  std::size_t episode = 0;
  std::size_t interactions = 0;  // cumulative
  double return_opt = 0.0;
  double d_opt = 0.0;
  double d_dir = 0.0;
  std::size_t search_steps = 0;
  bool improved = false;
};

struct TrainResult {
  PolicyParams params;
  std::vector<EpisodeRecord> records;
};

/// Called after every episode; return false to stop early.
using ProgressFn = std::function<bool(const EpisodeRecord&)>;

/// Header: episode,interactions,return_opt,d_opt,d_dir,search_steps,improved
void write_records_csv(std::ostream& out, std::span<const EpisodeRecord> records);

/// Trailing moving average of return_opt over `window` episodes.
std::vector<double> moving_average_returns(std::span<const EpisodeRecord> records, std::size_t window);

/// Formats a double for CSV output: %.10g, with nan / inf / -inf spelled out.
std::string format_number(double value);

}  // namespace dirpg
