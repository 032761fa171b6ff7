#include "wavefield/nn/adam.hpp"

#include <cmath>

namespace wavefield::nn {

Adam::Adam(std::vector<ParamBlock*> params, AdamConfig cfg) : params_(std::move(params)), cfg_(cfg) {
  for (const auto* p : params_) {
    m_.emplace_back(p->value.values.size(), 0.0);
    v_.emplace_back(p->value.values.size(), 0.0);
  }
}

void Adam::step() {
  for (const auto* p : params_)
    for (double g : p->grad.values)
      if (!std::isfinite(g)) throw NonFiniteGradient("non-finite gradient in " + p->name);

  ++t_;
  const double c1 = 1.0 - std::pow(cfg_.beta1, static_cast<double>(t_));
  const double c2 = 1.0 - std::pow(cfg_.beta2, static_cast<double>(t_));
  for (std::size_t b = 0; b < params_.size(); ++b) {
    auto& value = params_[b]->value.values;
    const auto& grad = params_[b]->grad.values;
    auto& m = m_[b];
    auto& v = v_[b];
    for (std::size_t i = 0; i < value.size(); ++i) {
      m[i] = cfg_.beta1 * m[i] + (1.0 - cfg_.beta1) * grad[i];
      v[i] = cfg_.beta2 * v[i] + (1.0 - cfg_.beta2) * grad[i] * grad[i];
      value[i] -= cfg_.lr * (m[i] / c1) / (std::sqrt(v[i] / c2) + cfg_.eps);
    }
  }
}

}  // namespace wavefield::nn
