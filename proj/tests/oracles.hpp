#pragma once

// Reference computations written independently of the library internals.

#include <cmath>
#include <cstddef>
#include <vector>

namespace oracle {

/// Probability of every complete trajectory (indexed by base-A code) of a
/// tabular sequence problem whose features are one-hot over internal prefix
/// nodes, under the linear-softmax policy theta (row per action).
inline std::vector<double> sequence_trajectory_probs(std::size_t actions, std::size_t horizon,
                                                     const std::vector<double>& theta) {
  std::size_t feature_dim = 0, count = 1;
  std::vector<std::size_t> offset;
  for (std::size_t t = 0; t < horizon; ++t) {
    offset.push_back(feature_dim);
    feature_dim += count;
    count *= actions;
  }
  std::vector<double> probs(count, 1.0);
  for (std::size_t code = 0; code < count; ++code) {
    std::vector<std::size_t> digits(horizon);
    std::size_t c = code;
    for (std::size_t t = horizon; t-- > 0;) {
      digits[t] = c % actions;
      c /= actions;
    }
    std::size_t prefix = 0;
    for (std::size_t t = 0; t < horizon; ++t) {
      const std::size_t node = offset[t] + prefix;
      double z = 0.0;
      for (std::size_t a = 0; a < actions; ++a) z += std::exp(theta[a * feature_dim + node]);
      probs[code] *= std::exp(theta[digits[t] * feature_dim + node]) / z;
      prefix = prefix * actions + digits[t];
    }
  }
  return probs;
}

}  // namespace oracle

namespace oracle {

/// Expected value of the direct policy gradient at finite epsilon on a
/// deterministic tabular sequence problem: (1/eps) sum_tau q(tau) dlogPi(tau),
/// where q is proportional to Pi(tau) exp(eps R(tau)). The control-variate
/// term has zero mean and drops out.
inline std::vector<double> sequence_direct_gradient_mean(std::size_t actions, std::size_t horizon,
                                                         const std::vector<double>& theta,
                                                         const std::vector<double>& rewards, double eps) {
  std::size_t feature_dim = 0, count = 1;
  std::vector<std::size_t> offset;
  for (std::size_t t = 0; t < horizon; ++t) {
    offset.push_back(feature_dim);
    feature_dim += count;
    count *= actions;
  }
  const auto probs = sequence_trajectory_probs(actions, horizon, theta);
  std::vector<double> q(count);
  double z = 0.0;
  for (std::size_t c = 0; c < count; ++c) z += q[c] = probs[c] * std::exp(eps * rewards[c]);
  std::vector<double> grad(theta.size(), 0.0);
  for (std::size_t code = 0; code < count; ++code) {
    std::vector<std::size_t> digits(horizon);
    std::size_t c = code;
    for (std::size_t t = horizon; t-- > 0;) {
      digits[t] = c % actions;
      c /= actions;
    }
    std::size_t prefix = 0;
    for (std::size_t t = 0; t < horizon; ++t) {
      const std::size_t node = offset[t] + prefix;
      double norm = 0.0;
      for (std::size_t a = 0; a < actions; ++a) norm += std::exp(theta[a * feature_dim + node]);
      for (std::size_t a = 0; a < actions; ++a) {
        const double pi = std::exp(theta[a * feature_dim + node]) / norm;
        grad[a * feature_dim + node] += q[code] / z / eps * ((a == digits[t] ? 1.0 : 0.0) - pi);
      }
      prefix = prefix * actions + digits[t];
    }
  }
  return grad;
}

}  // namespace oracle
