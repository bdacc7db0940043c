#pragma once

#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "lfc/nn/layers.hpp"

namespace lfc::nn {

/// An ordered layer stack with an optional second input branch merged by
/// elementwise addition (the critic topology). Single-branch networks keep
/// all layers in the trunk; two-branch networks run
///   head(trunk(main_input) + side(side_input)).
class Network {
 public:
  Network() = default;

  Network(Network&&) = default;
  Network& operator=(Network&&) = default;

  void add(std::unique_ptr<Layer> layer) { trunk_.push_back(std::move(layer)); }
  void add_side(std::unique_ptr<Layer> layer) { side_.push_back(std::move(layer)); }
  void add_head(std::unique_ptr<Layer> layer) { head_.push_back(std::move(layer)); }

  bool two_branch() const { return !side_.empty(); }

  Matrix forward(const Matrix& input, bool training = false, Rng* rng = nullptr);
  Matrix backward(const Matrix& grad_output);

  /// Two-branch forward/backward; backward returns (main grad, side grad).
  Matrix forward2(const Matrix& main_input, const Matrix& side_input, bool training = false,
                  Rng* rng = nullptr);
  std::pair<Matrix, Matrix> backward2(const Matrix& grad_output);

  std::vector<ParamRef> params();
  void zero_grads();
  std::size_t parameter_count();

  /// Deep copy including parameter values (fresh gradient buffers).
  Network clone() const;

  /// Copies parameter values from another network of identical shape.
  void copy_params_from(Network& other);

  std::vector<std::string> architecture() const;

  static Network from_architecture(const std::vector<std::string>& arch, Rng& init_rng);

 private:
  static Matrix run_forward(std::vector<std::unique_ptr<Layer>>& layers, const Matrix& in,
                            bool training, Rng* rng);
  static Matrix run_backward(std::vector<std::unique_ptr<Layer>>& layers, const Matrix& grad);

  std::vector<std::unique_ptr<Layer>> trunk_;
  std::vector<std::unique_ptr<Layer>> side_;
  std::vector<std::unique_ptr<Layer>> head_;
};

}  // namespace lfc::nn
