#pragma once

#include <complex>
#include <cstddef>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace wavefield::nn {

/// Dense storage of 64-bit floats; complex tensors interleave (re, im).
/// Matrices are column-major.
// Aligned so Eigen reductions over mapped storage sum in a fixed order.
using Storage = std::vector<double, Eigen::aligned_allocator<double>>;

struct Tensor {
  std::vector<std::size_t> shape;
  bool is_complex = false;
  Storage values;

  static Tensor zeros(std::vector<std::size_t> shape, bool is_complex);

  std::size_t elements() const;  // product of shape
  std::size_t real_count() const { return values.size(); }

  Eigen::Map<Eigen::MatrixXd> real_matrix();
  Eigen::Map<const Eigen::MatrixXd> real_matrix() const;
  Eigen::Map<Eigen::MatrixXcd> complex_matrix();
  Eigen::Map<const Eigen::MatrixXcd> complex_matrix() const;
};

/// A named learnable block with its gradient mirror. For complex blocks the
/// gradient holds (dL/dRe, dL/dIm) pairs of the real loss.
struct ParamBlock {
  std::string name;
  Tensor value;
  Tensor grad;

  ParamBlock() = default;
  ParamBlock(std::string name, std::vector<std::size_t> shape, bool is_complex);

  void zero_grad();
};

}  // namespace wavefield::nn
