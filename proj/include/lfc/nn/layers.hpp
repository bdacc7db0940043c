#pragma once

#include <Eigen/Dense>
#include <memory>
#include <string>
#include <vector>

#include "lfc/rng.hpp"

namespace lfc::nn {

/// Row-major data convention: feedforward inputs are (batch x channels),
/// sequence inputs are (time x channels). Row-wise layers (dense,
/// activations, dropout, affine) treat the two identically; recurrent layers
/// interpret rows as timesteps of a single sequence.
using Matrix = Eigen::MatrixXd;

/// A trainable tensor with its gradient accumulator.
struct ParamRef {
  std::string name;
  Matrix* value;
  Matrix* grad;
};

class Layer {
 public:
  virtual ~Layer() = default;

  /// Computes the layer output, caching whatever backward needs. Dropout is
  /// the only consumer of rng and of the training flag.
  virtual Matrix forward(const Matrix& input, bool training, Rng* rng) = 0;

  /// Propagates the output gradient, accumulating into parameter gradients.
  /// Requires a prior forward; throws std::logic_error on a stale cache.
  virtual Matrix backward(const Matrix& grad_output) = 0;

  virtual std::vector<ParamRef> params() { return {}; }

  /// One-line architecture descriptor, e.g. "dense 2 100" or "dropout 0.1".
  virtual std::string describe() const = 0;

  void zero_grads() {
    for (auto& p : params()) p.grad->setZero();
  }

 protected:
  void require_cache(bool have) const;
};

class Dense : public Layer {
 public:
  Dense(int in, int out, Rng& init_rng);

  Matrix forward(const Matrix& input, bool training, Rng* rng) override;
  Matrix backward(const Matrix& grad_output) override;
  std::vector<ParamRef> params() override;
  std::string describe() const override;

  Matrix weight;  // in x out
  Matrix bias;    // 1 x out
  Matrix weight_grad;
  Matrix bias_grad;

 private:
  Matrix input_;
  bool has_cache_ = false;
};

class Relu : public Layer {
 public:
  Matrix forward(const Matrix& input, bool training, Rng* rng) override;
  Matrix backward(const Matrix& grad_output) override;
  std::string describe() const override { return "relu"; }

 private:
  Matrix input_;
  bool has_cache_ = false;
};

class Tanh : public Layer {
 public:
  Matrix forward(const Matrix& input, bool training, Rng* rng) override;
  Matrix backward(const Matrix& grad_output) override;
  std::string describe() const override { return "tanh"; }

 private:
  Matrix output_;
  bool has_cache_ = false;
};

class Sigmoid : public Layer {
 public:
  Matrix forward(const Matrix& input, bool training, Rng* rng) override;
  Matrix backward(const Matrix& grad_output) override;
  std::string describe() const override { return "sigmoid"; }

 private:
  Matrix output_;
  bool has_cache_ = false;
};

/// Fixed (non-trainable) per-channel affine map y = x .* scale + offset.
/// Covers both the "normalization" entries of the network tables (divide by
/// a configured range) and output scaling onto physical bounds.
class FixedAffine : public Layer {
 public:
  FixedAffine(Eigen::RowVectorXd scale, Eigen::RowVectorXd offset);

  Matrix forward(const Matrix& input, bool training, Rng* rng) override;
  Matrix backward(const Matrix& grad_output) override;
  std::string describe() const override;

  const Eigen::RowVectorXd& scale() const { return scale_; }
  const Eigen::RowVectorXd& offset() const { return offset_; }

 private:
  Eigen::RowVectorXd scale_;
  Eigen::RowVectorXd offset_;
  bool has_cache_ = false;
};

/// Inverted dropout: training outputs are scaled by 1/(1-rate) so inference
/// is a pure pass-through.
class Dropout : public Layer {
 public:
  explicit Dropout(double rate);

  Matrix forward(const Matrix& input, bool training, Rng* rng) override;
  Matrix backward(const Matrix& grad_output) override;
  std::string describe() const override;

  double rate() const { return rate_; }

 private:
  double rate_;
  Matrix mask_;
  bool training_ = false;
  bool has_cache_ = false;
};

/// Single-sequence LSTM over (time x channels), returning the full hidden
/// sequence (time x hidden). Gate order in the packed weights: input,
/// forget, candidate, output.
class Lstm : public Layer {
 public:
  Lstm(int in, int hidden, Rng& init_rng);

  Matrix forward(const Matrix& input, bool training, Rng* rng) override;
  Matrix backward(const Matrix& grad_output) override;
  std::vector<ParamRef> params() override;
  std::string describe() const override;

  int input_size() const { return in_; }
  int hidden_size() const { return hidden_; }

  Matrix w_input;   // in x 4H
  Matrix w_hidden;  // H x 4H
  Matrix bias;      // 1 x 4H
  Matrix w_input_grad;
  Matrix w_hidden_grad;
  Matrix bias_grad;

 private:
  int in_;
  int hidden_;
  // forward cache
  Matrix input_;
  Matrix gates_;   // T x 4H, post-activation
  Matrix cells_;   // (T+1) x H, row 0 is c_0 = 0
  Matrix hidden_states_;  // (T+1) x H, row 0 is h_0 = 0
  Matrix cell_tanh_;      // T x H
  bool has_cache_ = false;
};

/// Bidirectional LSTM: a forward pass and a time-reversed pass, outputs
/// concatenated per timestep to (time x 2*hidden).
class BiLstm : public Layer {
 public:
  BiLstm(int in, int hidden, Rng& init_rng);

  Matrix forward(const Matrix& input, bool training, Rng* rng) override;
  Matrix backward(const Matrix& grad_output) override;
  std::vector<ParamRef> params() override;
  std::string describe() const override;

  Lstm& forward_cell() { return fwd_; }
  Lstm& backward_cell() { return bwd_; }

 private:
  int hidden_;
  Lstm fwd_;
  Lstm bwd_;
};

/// Rowwise softmax.
class Softmax : public Layer {
 public:
  Matrix forward(const Matrix& input, bool training, Rng* rng) override;
  Matrix backward(const Matrix& grad_output) override;
  std::string describe() const override { return "softmax"; }

 private:
  Matrix output_;
  bool has_cache_ = false;
};

/// Keeps only the final timestep of a sequence (classification head input).
class SelectLast : public Layer {
 public:
  Matrix forward(const Matrix& input, bool training, Rng* rng) override;
  Matrix backward(const Matrix& grad_output) override;
  std::string describe() const override { return "select_last"; }

 private:
  Eigen::Index rows_ = 0;
  bool has_cache_ = false;
};

std::unique_ptr<Layer> layer_from_descriptor(const std::string& descriptor, Rng& init_rng);

}  // namespace lfc::nn
