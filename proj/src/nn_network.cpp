#include "lfc/nn/network.hpp"

#include <stdexcept>

namespace lfc::nn {

Matrix Network::run_forward(std::vector<std::unique_ptr<Layer>>& layers, const Matrix& in,
                            bool training, Rng* rng) {
  Matrix x = in;
  for (auto& layer : layers) x = layer->forward(x, training, rng);
  return x;
}

Matrix Network::run_backward(std::vector<std::unique_ptr<Layer>>& layers, const Matrix& grad) {
  Matrix g = grad;
  for (auto it = layers.rbegin(); it != layers.rend(); ++it) g = (*it)->backward(g);
  return g;
}

Matrix Network::forward(const Matrix& input, bool training, Rng* rng) {
  if (two_branch()) throw std::logic_error("Network::forward: two-branch net needs forward2");
  Matrix x = run_forward(trunk_, input, training, rng);
  return run_forward(head_, x, training, rng);
}

Matrix Network::backward(const Matrix& grad_output) {
  if (two_branch()) throw std::logic_error("Network::backward: two-branch net needs backward2");
  Matrix g = run_backward(head_, grad_output);
  return run_backward(trunk_, g);
}

Matrix Network::forward2(const Matrix& main_input, const Matrix& side_input, bool training,
                         Rng* rng) {
  if (!two_branch()) throw std::logic_error("Network::forward2: no side branch");
  Matrix a = run_forward(trunk_, main_input, training, rng);
  Matrix b = run_forward(side_, side_input, training, rng);
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw std::invalid_argument("Network::forward2: branch outputs differ in shape");
  }
  return run_forward(head_, a + b, training, rng);
}

std::pair<Matrix, Matrix> Network::backward2(const Matrix& grad_output) {
  if (!two_branch()) throw std::logic_error("Network::backward2: no side branch");
  Matrix g = run_backward(head_, grad_output);
  // the merge is an elementwise sum, so the gradient flows to both branches
  Matrix g_main = run_backward(trunk_, g);
  Matrix g_side = run_backward(side_, g);
  return {std::move(g_main), std::move(g_side)};
}

std::vector<ParamRef> Network::params() {
  std::vector<ParamRef> out;
  auto collect = [&out](const char* prefix, std::vector<std::unique_ptr<Layer>>& layers) {
    for (std::size_t i = 0; i < layers.size(); ++i) {
      for (auto& p : layers[i]->params()) {
        out.push_back({std::string(prefix) + std::to_string(i) + "." + p.name, p.value, p.grad});
      }
    }
  };
  collect("trunk.", trunk_);
  collect("side.", side_);
  collect("head.", head_);
  return out;
}

void Network::zero_grads() {
  for (auto& p : params()) p.grad->setZero();
}

std::size_t Network::parameter_count() {
  std::size_t n = 0;
  for (auto& p : params()) n += static_cast<std::size_t>(p.value->size());
  return n;
}

Network Network::clone() const {
  Rng scratch(0);  // values are overwritten below
  Network copy = from_architecture(architecture(), scratch);
  copy.copy_params_from(const_cast<Network&>(*this));
  return copy;
}

void Network::copy_params_from(Network& other) {
  auto mine = params();
  auto theirs = other.params();
  if (mine.size() != theirs.size()) {
    throw std::invalid_argument("copy_params_from: parameter list mismatch");
  }
  for (std::size_t i = 0; i < mine.size(); ++i) {
    if (mine[i].value->rows() != theirs[i].value->rows() ||
        mine[i].value->cols() != theirs[i].value->cols()) {
      throw std::invalid_argument("copy_params_from: shape mismatch at " + mine[i].name);
    }
    *mine[i].value = *theirs[i].value;
  }
}

std::vector<std::string> Network::architecture() const {
  std::vector<std::string> arch;
  for (const auto& l : trunk_) arch.push_back("trunk: " + l->describe());
  for (const auto& l : side_) arch.push_back("side: " + l->describe());
  for (const auto& l : head_) arch.push_back("head: " + l->describe());
  return arch;
}

Network Network::from_architecture(const std::vector<std::string>& arch, Rng& init_rng) {
  Network net;
  for (const auto& entry : arch) {
    const auto colon = entry.find(": ");
    if (colon == std::string::npos) {
      throw std::invalid_argument("bad architecture entry: " + entry);
    }
    const std::string section = entry.substr(0, colon);
    auto layer = layer_from_descriptor(entry.substr(colon + 2), init_rng);
    if (section == "trunk") {
      net.add(std::move(layer));
    } else if (section == "side") {
      net.add_side(std::move(layer));
    } else if (section == "head") {
      net.add_head(std::move(layer));
    } else {
      throw std::invalid_argument("bad architecture section: " + section);
    }
  }
  return net;
}

}  // namespace lfc::nn
