#include "dirpg/gumbel.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace dirpg {

double sample_gumbel(double location, Rng& rng) {
  return location - std::log(-std::log(uniform_open(rng)));
}

double log_add_exp(double a, double b) {
  if (a == kNegInf) return b;
  if (b == kNegInf) return a;
  const double hi = std::max(a, b);
  return hi + std::log1p(std::exp(-std::abs(a - b)));
}

double truncated_gumbel_from_uniform(double location, double bound, double u) {
  if (location == kNegInf) return kNegInf;
  const double z = location - std::log(-std::log(u));
  if (bound == kInf) return z;
  return -log_add_exp(-bound, -z);
}

double sample_truncated_gumbel(double location, double bound, Rng& rng) {
  return truncated_gumbel_from_uniform(location, bound, uniform_open(rng));
}

double log_sum_exp(std::span<const double> values) {
  if (values.empty()) throw std::invalid_argument("log_sum_exp: empty input");
  const double hi = *std::max_element(values.begin(), values.end());
  if (hi == kNegInf) return kNegInf;
  if (hi == kInf) return kInf;
  double acc = 0.0;
  for (double v : values) acc += std::exp(v - hi);
  return hi + std::log(acc);
}

double log_sum_exp(std::initializer_list<double> values) {
  return log_sum_exp(std::span<const double>(values.begin(), values.size()));
}

}  // namespace dirpg
