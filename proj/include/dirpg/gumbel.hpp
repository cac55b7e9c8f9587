#pragma once

#include <initializer_list>
#include <limits>
#include <span>

#include "dirpg/rng.hpp"

namespace dirpg {

inline constexpr double kNegInf = -std::numeric_limits<double>::infinity();
inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// Gumbel(location) draw via the inverse CDF location - log(-log u).
double sample_gumbel(double location, Rng& rng);

/// Gumbel(location) conditioned on being <= bound.
///
/// Uses the rearranged form -logaddexp(-bound, -z) with z ~ Gumbel(location),
/// which stays finite when bound is far below location. A location of -inf
/// (zero-mass region) returns -inf; bound = +inf reduces to sample_gumbel.
double sample_truncated_gumbel(double location, double bound, Rng& rng);

/// Inverse of sample_truncated_gumbel for a given uniform; exposed for tests.
double truncated_gumbel_from_uniform(double location, double bound, double u);

/// log(exp(a) + exp(b)), exact for -inf operands.
double log_add_exp(double a, double b);

/// log(sum exp(v)). Throws std::invalid_argument on an empty list.
double log_sum_exp(std::span<const double> values);
double log_sum_exp(std::initializer_list<double> values);

}  // namespace dirpg
