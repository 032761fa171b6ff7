#pragma once

#include <cstdint>
#include <stdexcept>
#include <vector>

#include "wavefield/nn/tensor.hpp"

namespace wavefield::nn {

struct AdamConfig {
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

class NonFiniteGradient : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Adam with bias correction. Moments are kept per real scalar, so complex
/// blocks are updated as (re, im) pairs.
class Adam {
 public:
  Adam(std::vector<ParamBlock*> params, AdamConfig cfg = {});

  /// Applies one update. Throws NonFiniteGradient (naming the block) before
  /// touching any parameter when a gradient entry is NaN or infinite.
  void step();
  std::uint64_t steps() const { return t_; }
  const AdamConfig& config() const { return cfg_; }

 private:
  std::vector<ParamBlock*> params_;
  AdamConfig cfg_;
  std::vector<std::vector<double>> m_, v_;
  std::uint64_t t_ = 0;
};

}  // namespace wavefield::nn
