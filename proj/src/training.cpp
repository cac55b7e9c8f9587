#include "dirpg/training.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <string>

#include "dirpg/errors.hpp"

namespace dirpg {

std::string format_number(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.10g", value);
  return buf;
}

void write_records_csv(std::ostream& out, std::span<const EpisodeRecord> records) {
  out << "episode,interactions,return_opt,d_opt,d_dir,search_steps,improved\n";
  for (const auto& r : records) {
    out << r.episode << ',' << r.interactions << ',' << format_number(r.return_opt) << ','
        << format_number(r.d_opt) << ',' << format_number(r.d_dir) << ',' << r.search_steps << ','
        << (r.improved ? 1 : 0) << '\n';
  }
}

std::vector<double> moving_average_returns(std::span<const EpisodeRecord> records, std::size_t window) {
  if (window == 0) throw ContractViolation("moving average window must be positive");
  std::vector<double> out(records.size());
  double sum = 0.0;
  for (std::size_t i = 0; i < records.size(); ++i) {
    sum += records[i].return_opt;
    if (i >= window) sum -= records[i - window].return_opt;
    out[i] = sum / static_cast<double>(std::min(i + 1, window));
  }
  return out;
}

}  // namespace dirpg
