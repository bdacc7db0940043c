#pragma once

#include "lfc/nn/layers.hpp"

namespace lfc::nn {

struct LossResult {
  double loss = 0.0;
  Matrix grad;  // d loss / d input, same shape as the first argument
};

/// loss = -log softmax(logits)[label]; grad = softmax(logits) - one_hot(label).
/// logits is a 1 x C row; label indexes into [0, C).
LossResult softmax_cross_entropy(const Matrix& logits, int label);

/// Rowwise softmax of a 1 x C logits row (inference helper).
Eigen::RowVectorXd softmax_row(const Eigen::RowVectorXd& logits);

/// loss = mean over elements of 0.5 * (reconstruction - target)^2;
/// grad = (reconstruction - target) / element count.
LossResult mse_loss(const Matrix& reconstruction, const Matrix& target);

/// Mean absolute error over all elements (detector threshold metric).
double mean_absolute_error(const Matrix& reconstruction, const Matrix& target);

}  // namespace lfc::nn
