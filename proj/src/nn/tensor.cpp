#include "wavefield/nn/tensor.hpp"

#include <algorithm>
#include <functional>
#include <numeric>
#include <stdexcept>

namespace wavefield::nn {

namespace {

std::pair<Eigen::Index, Eigen::Index> as_matrix(const std::vector<std::size_t>& shape) {
  if (shape.size() == 1) return {static_cast<Eigen::Index>(shape[0]), 1};
  if (shape.size() == 2) return {static_cast<Eigen::Index>(shape[0]), static_cast<Eigen::Index>(shape[1])};
  throw std::logic_error("tensor is not a vector or matrix");
}

}  // namespace

Tensor Tensor::zeros(std::vector<std::size_t> shape, bool is_complex) {
  Tensor t;
  t.shape = std::move(shape);
  t.is_complex = is_complex;
  t.values.assign(t.elements() * (is_complex ? 2 : 1), 0.0);
  return t;
}

std::size_t Tensor::elements() const {
  return std::accumulate(shape.begin(), shape.end(), std::size_t{1}, std::multiplies<>());
}

Eigen::Map<Eigen::MatrixXd> Tensor::real_matrix() {
  if (is_complex) throw std::logic_error("real view of a complex tensor");
  const auto [r, c] = as_matrix(shape);
  return {values.data(), r, c};
}

Eigen::Map<const Eigen::MatrixXd> Tensor::real_matrix() const {
  if (is_complex) throw std::logic_error("real view of a complex tensor");
  const auto [r, c] = as_matrix(shape);
  return {values.data(), r, c};
}

Eigen::Map<Eigen::MatrixXcd> Tensor::complex_matrix() {
  if (!is_complex) throw std::logic_error("complex view of a real tensor");
  const auto [r, c] = as_matrix(shape);
  return {reinterpret_cast<std::complex<double>*>(values.data()), r, c};
}

Eigen::Map<const Eigen::MatrixXcd> Tensor::complex_matrix() const {
  if (!is_complex) throw std::logic_error("complex view of a real tensor");
  const auto [r, c] = as_matrix(shape);
  return {reinterpret_cast<const std::complex<double>*>(values.data()), r, c};
}

ParamBlock::ParamBlock(std::string n, std::vector<std::size_t> shape, bool is_complex)
    : name(std::move(n)), value(Tensor::zeros(shape, is_complex)), grad(Tensor::zeros(std::move(shape), is_complex)) {}

void ParamBlock::zero_grad() { std::fill(grad.values.begin(), grad.values.end(), 0.0); }

}  // namespace wavefield::nn
