#pragma once

#include <random>
#include <vector>

#include "wavefield/nn/tensor.hpp"

namespace wavefield::nn {

using Rng = std::mt19937_64;

/// Affine real layer out = W in + b over a batch of columns.
class DenseReal {
 public:
  DenseReal() = default;
  DenseReal(const std::string& name, std::size_t in, std::size_t out, Rng& rng);

  Eigen::MatrixXd forward(const Eigen::MatrixXd& input);
  /// Accumulates dW, db; returns dL/din when `input_grad` is set.
  Eigen::MatrixXd backward(const Eigen::MatrixXd& grad_out, bool input_grad = true);

  ParamBlock& weight() { return w_; }
  ParamBlock& bias() { return b_; }
  std::vector<ParamBlock*> parameters() { return {&w_, &b_}; }

 private:
  ParamBlock w_, b_;
  Eigen::MatrixXd input_;
};

/// Complex affine layer. Gradients follow the real-pair convention: with
/// G = dL/dRe(out) + j dL/dIm(out), dW = G in^H, db = sum G, din = W^H G.
class DenseComplex {
 public:
  DenseComplex() = default;
  DenseComplex(const std::string& name, std::size_t in, std::size_t out, Rng& rng, double init_scale = 1.0);

  Eigen::MatrixXcd forward(const Eigen::MatrixXcd& input);
  Eigen::MatrixXcd backward(const Eigen::MatrixXcd& grad_out, bool input_grad = true);

  ParamBlock& weight() { return w_; }
  ParamBlock& bias() { return b_; }
  std::vector<ParamBlock*> parameters() { return {&w_, &b_}; }

 private:
  ParamBlock w_, b_;
  Eigen::MatrixXcd input_;
};

Eigen::MatrixXd relu(const Eigen::MatrixXd& z);
Eigen::MatrixXd relu_backward(const Eigen::MatrixXd& z, const Eigen::MatrixXd& grad);

/// ReLU on real and imaginary parts separately; subgradient 0 at 0.
Eigen::MatrixXcd relu_c(const Eigen::MatrixXcd& z);
Eigen::MatrixXcd relu_c_backward(const Eigen::MatrixXcd& z, const Eigen::MatrixXcd& grad);

/// softmax(|z|) along a vector.
Eigen::VectorXd softmax_c(const Eigen::VectorXcd& z);
/// Cotangent of z given p = softmax_c(z) and dL/dp.
Eigen::VectorXcd softmax_c_backward(const Eigen::VectorXcd& z, const Eigen::VectorXd& p, const Eigen::VectorXd& grad_p);

/// Three affine layers with ReLU between them: in -> h1 -> h2 -> out.
class RealMlp {
 public:
  RealMlp() = default;
  RealMlp(const std::string& name, std::size_t in, std::size_t h1, std::size_t h2, std::size_t out, Rng& rng);

  Eigen::MatrixXd forward(const Eigen::MatrixXd& input);
  Eigen::MatrixXd backward(const Eigen::MatrixXd& grad_out, bool input_grad = false);

  DenseReal& last() { return layers_[2]; }
  std::vector<ParamBlock*> parameters();

 private:
  DenseReal layers_[3];
  Eigen::MatrixXd pre_[2];
};

/// Complex counterpart with ReLU_C activations.
class ComplexMlp {
 public:
  ComplexMlp() = default;
  ComplexMlp(const std::string& name, std::size_t in, std::size_t h1, std::size_t h2, std::size_t out, Rng& rng,
             double last_scale = 1.0);

  Eigen::MatrixXcd forward(const Eigen::MatrixXcd& input);
  Eigen::MatrixXcd backward(const Eigen::MatrixXcd& grad_out, bool input_grad = false);

  DenseComplex& last() { return layers_[2]; }
  std::vector<ParamBlock*> parameters();

 private:
  DenseComplex layers_[3];
  Eigen::MatrixXcd pre_[2];
};

}  // namespace wavefield::nn
