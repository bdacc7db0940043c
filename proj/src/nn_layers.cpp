#include "lfc/nn/layers.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace lfc::nn {

namespace {

Matrix uniform_init(Eigen::Index rows, Eigen::Index cols, double bound, Rng& rng) {
  Matrix m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    for (Eigen::Index j = 0; j < cols; ++j) m(i, j) = rng.uniform(-bound, bound);
  }
  return m;
}

inline double sigmoid_scalar(double x) { return 1.0 / (1.0 + std::exp(-x)); }

}  // namespace

void Layer::require_cache(bool have) const {
  if (!have) throw std::logic_error("backward without a matching forward (stale cache)");
}

// ---------------------------------------------------------------- Dense

Dense::Dense(int in, int out, Rng& init_rng) {
  if (in < 1 || out < 1) throw std::invalid_argument("Dense: sizes must be >= 1");
  const double bound = 1.0 / std::sqrt(static_cast<double>(in));
  weight = uniform_init(in, out, bound, init_rng);
  bias = Matrix::Zero(1, out);
  weight_grad = Matrix::Zero(in, out);
  bias_grad = Matrix::Zero(1, out);
}

Matrix Dense::forward(const Matrix& input, bool, Rng*) {
  if (input.cols() != weight.rows()) {
    throw std::invalid_argument("Dense: input has " + std::to_string(input.cols()) +
                                " channels, expected " + std::to_string(weight.rows()));
  }
  input_ = input;
  has_cache_ = true;
  Matrix out = input * weight;
  out.rowwise() += bias.row(0);
  return out;
}

Matrix Dense::backward(const Matrix& grad_output) {
  require_cache(has_cache_);
  weight_grad.noalias() += input_.transpose() * grad_output;
  bias_grad.row(0) += grad_output.colwise().sum();
  return grad_output * weight.transpose();
}

std::vector<ParamRef> Dense::params() {
  return {{"W", &weight, &weight_grad}, {"b", &bias, &bias_grad}};
}

std::string Dense::describe() const {
  std::ostringstream os;
  os << "dense " << weight.rows() << ' ' << weight.cols();
  return os.str();
}

// ---------------------------------------------------------------- activations

Matrix Relu::forward(const Matrix& input, bool, Rng*) {
  input_ = input;
  has_cache_ = true;
  return input.cwiseMax(0.0);
}

Matrix Relu::backward(const Matrix& grad_output) {
  require_cache(has_cache_);
  return (input_.array() > 0.0).select(grad_output, Matrix::Zero(grad_output.rows(), grad_output.cols()));
}

Matrix Tanh::forward(const Matrix& input, bool, Rng*) {
  output_ = input.array().tanh();
  has_cache_ = true;
  return output_;
}

Matrix Tanh::backward(const Matrix& grad_output) {
  require_cache(has_cache_);
  return (grad_output.array() * (1.0 - output_.array().square())).matrix();
}

Matrix Sigmoid::forward(const Matrix& input, bool, Rng*) {
  output_ = input.unaryExpr([](double x) { return sigmoid_scalar(x); });
  has_cache_ = true;
  return output_;
}

Matrix Sigmoid::backward(const Matrix& grad_output) {
  require_cache(has_cache_);
  return (grad_output.array() * output_.array() * (1.0 - output_.array())).matrix();
}

// ---------------------------------------------------------------- FixedAffine

FixedAffine::FixedAffine(Eigen::RowVectorXd scale, Eigen::RowVectorXd offset)
    : scale_(std::move(scale)), offset_(std::move(offset)) {
  if (scale_.size() != offset_.size()) {
    throw std::invalid_argument("FixedAffine: scale/offset size mismatch");
  }
}

Matrix FixedAffine::forward(const Matrix& input, bool, Rng*) {
  if (input.cols() != scale_.size()) {
    throw std::invalid_argument("FixedAffine: channel count mismatch");
  }
  has_cache_ = true;
  Matrix out = input.array().rowwise() * scale_.array();
  out.rowwise() += offset_;
  return out;
}

Matrix FixedAffine::backward(const Matrix& grad_output) {
  require_cache(has_cache_);
  return grad_output.array().rowwise() * scale_.array();
}

std::string FixedAffine::describe() const {
  std::ostringstream os;
  os << "affine";
  for (Eigen::Index i = 0; i < scale_.size(); ++i) os << ' ' << scale_(i);
  os << " |";
  for (Eigen::Index i = 0; i < offset_.size(); ++i) os << ' ' << offset_(i);
  return os.str();
}

// ---------------------------------------------------------------- Dropout

Dropout::Dropout(double rate) : rate_(rate) {
  if (rate < 0.0 || rate >= 1.0) throw std::invalid_argument("Dropout: rate must be in [0, 1)");
}

Matrix Dropout::forward(const Matrix& input, bool training, Rng* rng) {
  training_ = training && rate_ > 0.0;
  has_cache_ = true;
  if (!training_) return input;
  if (rng == nullptr) throw std::invalid_argument("Dropout: training forward needs an rng");
  const double keep = 1.0 - rate_;
  mask_.resize(input.rows(), input.cols());
  for (Eigen::Index i = 0; i < input.rows(); ++i) {
    for (Eigen::Index j = 0; j < input.cols(); ++j) {
      mask_(i, j) = rng->uniform() < keep ? 1.0 / keep : 0.0;
    }
  }
  return input.cwiseProduct(mask_);
}

Matrix Dropout::backward(const Matrix& grad_output) {
  require_cache(has_cache_);
  if (!training_) return grad_output;
  return grad_output.cwiseProduct(mask_);
}

std::string Dropout::describe() const {
  std::ostringstream os;
  os << "dropout " << rate_;
  return os.str();
}

// ---------------------------------------------------------------- Lstm

Lstm::Lstm(int in, int hidden, Rng& init_rng) : in_(in), hidden_(hidden) {
  if (in < 1 || hidden < 1) throw std::invalid_argument("Lstm: sizes must be >= 1");
  w_input = uniform_init(in, 4 * hidden, 1.0 / std::sqrt(static_cast<double>(in)), init_rng);
  w_hidden =
      uniform_init(hidden, 4 * hidden, 1.0 / std::sqrt(static_cast<double>(hidden)), init_rng);
  bias = Matrix::Zero(1, 4 * hidden);
  bias.block(0, hidden, 1, hidden).setOnes();  // forget-gate bias starts at +1
  w_input_grad = Matrix::Zero(in, 4 * hidden);
  w_hidden_grad = Matrix::Zero(hidden, 4 * hidden);
  bias_grad = Matrix::Zero(1, 4 * hidden);
}

Matrix Lstm::forward(const Matrix& input, bool, Rng*) {
  if (input.cols() != in_) throw std::invalid_argument("Lstm: channel count mismatch");
  const Eigen::Index T = input.rows();
  const int H = hidden_;

  input_ = input;
  gates_.resize(T, 4 * H);
  cells_ = Matrix::Zero(T + 1, H);
  hidden_states_ = Matrix::Zero(T + 1, H);
  cell_tanh_.resize(T, H);

  Eigen::RowVectorXd z(4 * H);
  for (Eigen::Index t = 0; t < T; ++t) {
    z.noalias() = input.row(t) * w_input;
    z.noalias() += hidden_states_.row(t) * w_hidden;
    z += bias.row(0);
    for (int j = 0; j < H; ++j) {
      const double i_g = sigmoid_scalar(z(j));
      const double f_g = sigmoid_scalar(z(H + j));
      const double g_g = std::tanh(z(2 * H + j));
      const double o_g = sigmoid_scalar(z(3 * H + j));
      const double c = f_g * cells_(t, j) + i_g * g_g;
      const double ct = std::tanh(c);
      gates_(t, j) = i_g;
      gates_(t, H + j) = f_g;
      gates_(t, 2 * H + j) = g_g;
      gates_(t, 3 * H + j) = o_g;
      cells_(t + 1, j) = c;
      cell_tanh_(t, j) = ct;
      hidden_states_(t + 1, j) = o_g * ct;
    }
  }
  has_cache_ = true;
  return hidden_states_.bottomRows(T);
}

Matrix Lstm::backward(const Matrix& grad_output) {
  require_cache(has_cache_);
  const Eigen::Index T = input_.rows();
  const int H = hidden_;
  if (grad_output.rows() != T || grad_output.cols() != H) {
    throw std::invalid_argument("Lstm::backward: gradient shape mismatch");
  }

  Matrix grad_input(T, in_);
  Eigen::RowVectorXd dh_next = Eigen::RowVectorXd::Zero(H);
  Eigen::RowVectorXd dc_next = Eigen::RowVectorXd::Zero(H);
  Eigen::RowVectorXd dz(4 * H);

  for (Eigen::Index t = T - 1; t >= 0; --t) {
    for (int j = 0; j < H; ++j) {
      const double i_g = gates_(t, j);
      const double f_g = gates_(t, H + j);
      const double g_g = gates_(t, 2 * H + j);
      const double o_g = gates_(t, 3 * H + j);
      const double ct = cell_tanh_(t, j);

      const double dh = grad_output(t, j) + dh_next(j);
      const double dct = dh * o_g * (1.0 - ct * ct) + dc_next(j);

      dz(j) = dct * g_g * i_g * (1.0 - i_g);
      dz(H + j) = dct * cells_(t, j) * f_g * (1.0 - f_g);
      dz(2 * H + j) = dct * i_g * (1.0 - g_g * g_g);
      dz(3 * H + j) = dh * ct * o_g * (1.0 - o_g);
      dc_next(j) = dct * f_g;
    }
    w_input_grad.noalias() += input_.row(t).transpose() * dz;
    w_hidden_grad.noalias() += hidden_states_.row(t).transpose() * dz;
    bias_grad.row(0) += dz;
    grad_input.row(t).noalias() = dz * w_input.transpose();
    dh_next.noalias() = dz * w_hidden.transpose();
  }
  return grad_input;
}

std::vector<ParamRef> Lstm::params() {
  return {{"Wx", &w_input, &w_input_grad},
          {"Wh", &w_hidden, &w_hidden_grad},
          {"b", &bias, &bias_grad}};
}

std::string Lstm::describe() const {
  std::ostringstream os;
  os << "lstm " << in_ << ' ' << hidden_;
  return os.str();
}

// ---------------------------------------------------------------- BiLstm

BiLstm::BiLstm(int in, int hidden, Rng& init_rng)
    : hidden_(hidden), fwd_(in, hidden, init_rng), bwd_(in, hidden, init_rng) {}

Matrix BiLstm::forward(const Matrix& input, bool training, Rng* rng) {
  const Eigen::Index T = input.rows();
  Matrix out(T, 2 * hidden_);
  out.leftCols(hidden_) = fwd_.forward(input, training, rng);
  out.rightCols(hidden_) = bwd_.forward(input.colwise().reverse(), training, rng)
                               .colwise()
                               .reverse();
  return out;
}

Matrix BiLstm::backward(const Matrix& grad_output) {
  if (grad_output.cols() != 2 * hidden_) {
    throw std::invalid_argument("BiLstm::backward: gradient shape mismatch");
  }
  Matrix grad = fwd_.backward(grad_output.leftCols(hidden_));
  grad += bwd_.backward(grad_output.rightCols(hidden_).colwise().reverse()).colwise().reverse();
  return grad;
}

std::vector<ParamRef> BiLstm::params() {
  std::vector<ParamRef> out;
  for (auto& p : fwd_.params()) out.push_back({"fwd." + p.name, p.value, p.grad});
  for (auto& p : bwd_.params()) out.push_back({"bwd." + p.name, p.value, p.grad});
  return out;
}

std::string BiLstm::describe() const {
  std::ostringstream os;
  os << "bilstm " << fwd_.input_size() << ' ' << hidden_;
  return os.str();
}

// ---------------------------------------------------------------- Softmax

Matrix Softmax::forward(const Matrix& input, bool, Rng*) {
  output_.resize(input.rows(), input.cols());
  for (Eigen::Index i = 0; i < input.rows(); ++i) {
    const double m = input.row(i).maxCoeff();
    Eigen::RowVectorXd e = (input.row(i).array() - m).exp();
    output_.row(i) = e / e.sum();
  }
  has_cache_ = true;
  return output_;
}

Matrix Softmax::backward(const Matrix& grad_output) {
  require_cache(has_cache_);
  Matrix grad(grad_output.rows(), grad_output.cols());
  for (Eigen::Index i = 0; i < grad_output.rows(); ++i) {
    const double dot = grad_output.row(i).dot(output_.row(i));
    grad.row(i) = output_.row(i).cwiseProduct(grad_output.row(i)) - dot * output_.row(i);
  }
  return grad;
}

// ---------------------------------------------------------------- SelectLast

Matrix SelectLast::forward(const Matrix& input, bool, Rng*) {
  if (input.rows() < 1) throw std::invalid_argument("SelectLast: empty sequence");
  rows_ = input.rows();
  has_cache_ = true;
  return input.bottomRows(1);
}

Matrix SelectLast::backward(const Matrix& grad_output) {
  require_cache(has_cache_);
  Matrix grad = Matrix::Zero(rows_, grad_output.cols());
  grad.bottomRows(1) = grad_output;
  return grad;
}

// ---------------------------------------------------------------- factory

std::unique_ptr<Layer> layer_from_descriptor(const std::string& descriptor, Rng& init_rng) {
  std::istringstream is(descriptor);
  std::string kind;
  is >> kind;
  if (kind == "dense") {
    int in = 0, out = 0;
    is >> in >> out;
    return std::make_unique<Dense>(in, out, init_rng);
  }
  if (kind == "relu") return std::make_unique<Relu>();
  if (kind == "tanh") return std::make_unique<Tanh>();
  if (kind == "sigmoid") return std::make_unique<Sigmoid>();
  if (kind == "softmax") return std::make_unique<Softmax>();
  if (kind == "select_last") return std::make_unique<SelectLast>();
  if (kind == "dropout") {
    double rate = 0.0;
    is >> rate;
    return std::make_unique<Dropout>(rate);
  }
  if (kind == "lstm" || kind == "bilstm") {
    int in = 0, hidden = 0;
    is >> in >> hidden;
    if (kind == "lstm") return std::make_unique<Lstm>(in, hidden, init_rng);
    return std::make_unique<BiLstm>(in, hidden, init_rng);
  }
  if (kind == "affine") {
    std::vector<double> scale;
    std::vector<double> offset;
    std::string tok;
    bool after_bar = false;
    while (is >> tok) {
      if (tok == "|") {
        after_bar = true;
        continue;
      }
      (after_bar ? offset : scale).push_back(std::stod(tok));
    }
    if (scale.size() != offset.size() || scale.empty()) {
      throw std::invalid_argument("affine descriptor needs matching scale/offset lists");
    }
    Eigen::RowVectorXd s(scale.size()), o(offset.size());
    for (std::size_t i = 0; i < scale.size(); ++i) {
      s(static_cast<Eigen::Index>(i)) = scale[i];
      o(static_cast<Eigen::Index>(i)) = offset[i];
    }
    return std::make_unique<FixedAffine>(s, o);
  }
  throw std::invalid_argument("unknown layer descriptor: " + descriptor);
}

}  // namespace lfc::nn
