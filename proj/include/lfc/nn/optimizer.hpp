#pragma once

#include <vector>

#include "lfc/nn/layers.hpp"

namespace lfc::nn {

enum class OptimizerKind { Sgd, Adam };

/// SGD applies p -= lr * grad. Adam keeps bias-corrected first and second
/// moments per parameter (beta1 = 0.9, beta2 = 0.999, eps = 1e-8).
class Optimizer {
 public:
  Optimizer(OptimizerKind kind, double learning_rate);

  /// Applies one update from the accumulated gradients, then leaves the
  /// gradients untouched (callers zero them between batches). The parameter
  /// list must be shape-stable across calls.
  void step(const std::vector<ParamRef>& params);

  OptimizerKind kind() const { return kind_; }
  double learning_rate() const { return lr_; }
  void set_learning_rate(double lr) { lr_ = lr; }
  long step_count() const { return t_; }

 private:
  OptimizerKind kind_;
  double lr_;
  double beta1_ = 0.9;
  double beta2_ = 0.999;
  double eps_ = 1e-8;
  long t_ = 0;
  std::vector<Matrix> m_;
  std::vector<Matrix> v_;
};

}  // namespace lfc::nn
