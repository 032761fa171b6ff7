#include "wavefield/nn/layers.hpp"

#include <cmath>
#include <stdexcept>

namespace wavefield::nn {

namespace {

void uniform_fill(Storage& v, double limit, Rng& rng) {
  std::uniform_real_distribution<double> dist(-limit, limit);
  for (auto& x : v) x = dist(rng);
}

double glorot(std::size_t in, std::size_t out) { return std::sqrt(6.0 / static_cast<double>(in + out)); }

}  // namespace

DenseReal::DenseReal(const std::string& name, std::size_t in, std::size_t out, Rng& rng)
    : w_(name + ".weight", {out, in}, false), b_(name + ".bias", {out}, false) {
  uniform_fill(w_.value.values, glorot(in, out), rng);
}

Eigen::MatrixXd DenseReal::forward(const Eigen::MatrixXd& input) {
  const auto W = w_.value.real_matrix();
  if (input.rows() != W.cols()) throw std::invalid_argument(w_.name + ": input size mismatch");
  input_ = input;
  Eigen::MatrixXd out = W * input;
  out.colwise() += b_.value.real_matrix().col(0);
  return out;
}

Eigen::MatrixXd DenseReal::backward(const Eigen::MatrixXd& grad_out, bool input_grad) {
  if (grad_out.cols() != input_.cols()) throw std::invalid_argument(w_.name + ": gradient batch mismatch");
  w_.grad.real_matrix().noalias() += grad_out * input_.transpose();
  b_.grad.real_matrix().col(0) += grad_out.rowwise().sum();
  if (!input_grad) return {};
  return w_.value.real_matrix().transpose() * grad_out;
}

DenseComplex::DenseComplex(const std::string& name, std::size_t in, std::size_t out, Rng& rng, double init_scale)
    : w_(name + ".weight", {out, in}, true), b_(name + ".bias", {out}, true) {
  uniform_fill(w_.value.values, glorot(in, out) / std::sqrt(2.0) * init_scale, rng);
}

Eigen::MatrixXcd DenseComplex::forward(const Eigen::MatrixXcd& input) {
  const auto W = w_.value.complex_matrix();
  if (input.rows() != W.cols()) throw std::invalid_argument(w_.name + ": input size mismatch");
  input_ = input;
  Eigen::MatrixXcd out = W * input;
  out.colwise() += b_.value.complex_matrix().col(0);
  return out;
}

Eigen::MatrixXcd DenseComplex::backward(const Eigen::MatrixXcd& grad_out, bool input_grad) {
  if (grad_out.cols() != input_.cols()) throw std::invalid_argument(w_.name + ": gradient batch mismatch");
  w_.grad.complex_matrix().noalias() += grad_out * input_.adjoint();
  b_.grad.complex_matrix().col(0) += grad_out.rowwise().sum();
  if (!input_grad) return {};
  return w_.value.complex_matrix().adjoint() * grad_out;
}

Eigen::MatrixXd relu(const Eigen::MatrixXd& z) { return z.cwiseMax(0.0); }

Eigen::MatrixXd relu_backward(const Eigen::MatrixXd& z, const Eigen::MatrixXd& grad) {
  return (z.array() > 0.0).select(grad, 0.0);
}

Eigen::MatrixXcd relu_c(const Eigen::MatrixXcd& z) {
  return z.unaryExpr([](const std::complex<double>& v) {
    return std::complex<double>(std::max(v.real(), 0.0), std::max(v.imag(), 0.0));
  });
}

Eigen::MatrixXcd relu_c_backward(const Eigen::MatrixXcd& z, const Eigen::MatrixXcd& grad) {
  Eigen::MatrixXcd out(z.rows(), z.cols());
  for (Eigen::Index i = 0; i < z.size(); ++i) {
    const auto v = z.data()[i], g = grad.data()[i];
    out.data()[i] = {v.real() > 0.0 ? g.real() : 0.0, v.imag() > 0.0 ? g.imag() : 0.0};
  }
  return out;
}

Eigen::VectorXd softmax_c(const Eigen::VectorXcd& z) {
  if (z.size() == 0) throw std::invalid_argument("softmax of an empty vector");
  const Eigen::VectorXd m = z.cwiseAbs();
  const Eigen::VectorXd e = (m.array() - m.maxCoeff()).exp();
  return e / e.sum();
}

Eigen::VectorXcd softmax_c_backward(const Eigen::VectorXcd& z, const Eigen::VectorXd& p, const Eigen::VectorXd& grad_p) {
  const double mean = p.dot(grad_p);
  Eigen::VectorXcd g(z.size());
  for (Eigen::Index i = 0; i < z.size(); ++i) {
    const double dm = p(i) * (grad_p(i) - mean);
    const double mag = std::abs(z(i));
    g(i) = mag > 0.0 ? dm * z(i) / mag : std::complex<double>(0.0, 0.0);
  }
  return g;
}

RealMlp::RealMlp(const std::string& name, std::size_t in, std::size_t h1, std::size_t h2, std::size_t out, Rng& rng)
    : layers_{DenseReal(name + ".0", in, h1, rng), DenseReal(name + ".1", h1, h2, rng),
              DenseReal(name + ".2", h2, out, rng)} {}

Eigen::MatrixXd RealMlp::forward(const Eigen::MatrixXd& input) {
  pre_[0] = layers_[0].forward(input);
  pre_[1] = layers_[1].forward(relu(pre_[0]));
  return layers_[2].forward(relu(pre_[1]));
}

Eigen::MatrixXd RealMlp::backward(const Eigen::MatrixXd& grad_out, bool input_grad) {
  Eigen::MatrixXd g = relu_backward(pre_[1], layers_[2].backward(grad_out));
  g = relu_backward(pre_[0], layers_[1].backward(g));
  return layers_[0].backward(g, input_grad);
}

std::vector<ParamBlock*> RealMlp::parameters() {
  std::vector<ParamBlock*> out;
  for (auto& l : layers_)
    for (auto* p : l.parameters()) out.push_back(p);
  return out;
}

ComplexMlp::ComplexMlp(const std::string& name, std::size_t in, std::size_t h1, std::size_t h2, std::size_t out,
                       Rng& rng, double last_scale)
    : layers_{DenseComplex(name + ".0", in, h1, rng), DenseComplex(name + ".1", h1, h2, rng),
              DenseComplex(name + ".2", h2, out, rng, last_scale)} {}

Eigen::MatrixXcd ComplexMlp::forward(const Eigen::MatrixXcd& input) {
  pre_[0] = layers_[0].forward(input);
  pre_[1] = layers_[1].forward(relu_c(pre_[0]));
  return layers_[2].forward(relu_c(pre_[1]));
}

Eigen::MatrixXcd ComplexMlp::backward(const Eigen::MatrixXcd& grad_out, bool input_grad) {
  Eigen::MatrixXcd g = relu_c_backward(pre_[1], layers_[2].backward(grad_out));
  g = relu_c_backward(pre_[0], layers_[1].backward(g));
  return layers_[0].backward(g, input_grad);
}

std::vector<ParamBlock*> ComplexMlp::parameters() {
  std::vector<ParamBlock*> out;
  for (auto& l : layers_)
    for (auto* p : l.parameters()) out.push_back(p);
  return out;
}

}  // namespace wavefield::nn
