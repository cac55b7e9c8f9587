#include "dirpg/optimizer.hpp"

#include <cmath>

#include "dirpg/errors.hpp"

namespace dirpg {

OptimizerKind parse_optimizer_kind(const std::string& name) {
  if (name == "sgd") return OptimizerKind::sgd;
  if (name == "adaptive_moment" || name == "adam") return OptimizerKind::adaptive_moment;
  throw ConfigError("optimizer.name", "unknown optimizer '" + name + "'");
}

std::string to_string(OptimizerKind kind) {
  return kind == OptimizerKind::sgd ? "sgd" : "adaptive_moment";
}

Optimizer::Optimizer(OptimizerKind kind, double learning_rate, std::size_t dim)
    : kind_(kind), lr_(learning_rate) {
  if (!(learning_rate > 0.0)) throw ContractViolation("Optimizer: learning rate must be positive");
  if (kind == OptimizerKind::adaptive_moment) {
    m_.assign(dim, 0.0);
    v_.assign(dim, 0.0);
  }
}

void Optimizer::ascend(std::span<double> theta, std::span<const double> grad) {
  if (theta.size() != grad.size()) throw ContractViolation("Optimizer: gradient size mismatch");
  ++t_;
  if (kind_ == OptimizerKind::sgd) {
    for (std::size_t i = 0; i < theta.size(); ++i) theta[i] += lr_ * grad[i];
    return;
  }
  if (m_.size() != theta.size()) throw ContractViolation("Optimizer: parameter size changed");
  const double c1 = 1.0 - std::pow(beta1_, static_cast<double>(t_));
  const double c2 = 1.0 - std::pow(beta2_, static_cast<double>(t_));
  for (std::size_t i = 0; i < theta.size(); ++i) {
    m_[i] = beta1_ * m_[i] + (1.0 - beta1_) * grad[i];
    v_[i] = beta2_ * v_[i] + (1.0 - beta2_) * grad[i] * grad[i];
    theta[i] += lr_ * (m_[i] / c1) / (std::sqrt(v_[i] / c2) + eps_);
  }
}

}  // namespace dirpg
