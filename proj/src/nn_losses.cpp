#include "lfc/nn/losses.hpp"

#include <cmath>
#include <stdexcept>

namespace lfc::nn {

LossResult softmax_cross_entropy(const Matrix& logits, int label) {
  if (logits.rows() != 1) throw std::invalid_argument("softmax_cross_entropy: expected 1 x C logits");
  if (label < 0 || label >= logits.cols()) {
    throw std::out_of_range("softmax_cross_entropy: label out of range");
  }
  const double m = logits.row(0).maxCoeff();
  Eigen::RowVectorXd e = (logits.row(0).array() - m).exp();
  const double sum = e.sum();

  LossResult out;
  out.loss = -(logits(0, label) - m - std::log(sum));
  out.grad = e / sum;
  out.grad(0, label) -= 1.0;
  return out;
}

Eigen::RowVectorXd softmax_row(const Eigen::RowVectorXd& logits) {
  const double m = logits.maxCoeff();
  Eigen::RowVectorXd e = (logits.array() - m).exp();
  return e / e.sum();
}

LossResult mse_loss(const Matrix& reconstruction, const Matrix& target) {
  if (reconstruction.rows() != target.rows() || reconstruction.cols() != target.cols()) {
    throw std::invalid_argument("mse_loss: shape mismatch");
  }
  const double n = static_cast<double>(reconstruction.size());
  const Matrix diff = reconstruction - target;
  LossResult out;
  out.loss = 0.5 * diff.array().square().sum() / n;
  out.grad = diff / n;
  return out;
}

double mean_absolute_error(const Matrix& reconstruction, const Matrix& target) {
  if (reconstruction.rows() != target.rows() || reconstruction.cols() != target.cols()) {
    throw std::invalid_argument("mean_absolute_error: shape mismatch");
  }
  return (reconstruction - target).array().abs().mean();
}

}  // namespace lfc::nn
