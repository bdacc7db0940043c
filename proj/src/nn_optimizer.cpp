#include "lfc/nn/optimizer.hpp"

#include <cmath>
#include <stdexcept>

namespace lfc::nn {

Optimizer::Optimizer(OptimizerKind kind, double learning_rate)
    : kind_(kind), lr_(learning_rate) {
  if (!(learning_rate > 0.0)) throw std::invalid_argument("Optimizer: lr must be > 0");
}

void Optimizer::step(const std::vector<ParamRef>& params) {
  if (kind_ == OptimizerKind::Sgd) {
    for (const auto& p : params) *p.value -= lr_ * *p.grad;
    ++t_;
    return;
  }

  if (m_.empty()) {
    m_.reserve(params.size());
    v_.reserve(params.size());
    for (const auto& p : params) {
      m_.push_back(Matrix::Zero(p.value->rows(), p.value->cols()));
      v_.push_back(Matrix::Zero(p.value->rows(), p.value->cols()));
    }
  }
  if (m_.size() != params.size()) {
    throw std::invalid_argument("Optimizer::step: parameter list changed size");
  }

  ++t_;
  const double bc1 = 1.0 - std::pow(beta1_, static_cast<double>(t_));
  const double bc2 = 1.0 - std::pow(beta2_, static_cast<double>(t_));
  for (std::size_t i = 0; i < params.size(); ++i) {
    const auto& g = *params[i].grad;
    if (g.rows() != m_[i].rows() || g.cols() != m_[i].cols()) {
      throw std::invalid_argument("Optimizer::step: shape changed for " + params[i].name);
    }
    m_[i] = beta1_ * m_[i] + (1.0 - beta1_) * g;
    v_[i] = beta2_ * v_[i] + (1.0 - beta2_) * g.cwiseProduct(g);
    const Matrix m_hat = m_[i] / bc1;
    const Matrix v_hat = v_[i] / bc2;
    params[i].value->array() -= lr_ * m_hat.array() / (v_hat.array().sqrt() + eps_);
  }
}

}  // namespace lfc::nn
