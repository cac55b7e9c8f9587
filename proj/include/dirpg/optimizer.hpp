#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace dirpg {

enum class OptimizerKind { sgd, adaptive_moment };

OptimizerKind parse_optimizer_kind(const std::string& name);
std::string to_string(OptimizerKind kind);

/// Gradient ascent: theta += step(grad). The adaptive-moment variant keeps
/// bias-corrected first and second moment estimates.
class Optimizer {
 public:
  Optimizer(OptimizerKind kind, double learning_rate, std::size_t dim);

  void ascend(std::span<double> theta, std::span<const double> grad);

  OptimizerKind kind() const { return kind_; }
  double learning_rate() const { return lr_; }
  std::size_t steps() const { return t_; }

 private:
  OptimizerKind kind_;
  double lr_;
  double beta1_ = 0.9;
  double beta2_ = 0.999;
  double eps_ = 1e-8;
  std::size_t t_ = 0;
  std::vector<double> m_;
  std::vector<double> v_;
};

}  // namespace dirpg
