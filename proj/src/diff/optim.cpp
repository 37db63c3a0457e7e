// Copyright 2026 The MSAM Authors.
// SPDX-License-Identifier: Apache-2.0

#include "msam/diff/optim.hpp"

#include <fmt/format.h>

#include <cmath>

namespace msam::diff {

template <typename T>
Adam<T>::Adam(const ParameterSet<T>& params, AdamOptions options)
    : options_(options), m_(params.zeros_like()), v_(params.zeros_like()) {}

template <typename T>
void Adam<T>::step(ParameterSet<T>& params, const std::vector<Tensor<T>>& grads, double lr) {
  if (grads.size() != params.size() || m_.size() != params.size()) {
    throw DimensionError(fmt::format("adam: {} gradients for {} parameters", grads.size(),
                                     params.size()));
  }
  for (std::size_t i = 0; i < grads.size(); ++i) {
    if (!grads[i].same_shape(params[i])) {
      throw DimensionError("adam: gradient shape mismatch for '" + params.name(i) + "'");
    }
    if (!all_finite(grads[i].data())) {
      throw NumericError("adam: non-finite gradient for '" + params.name(i) + "'");
    }
  }
  ++step_;
  const double b1 = options_.beta1;
  const double b2 = options_.beta2;
  const double c1 = 1.0 - std::pow(b1, static_cast<double>(step_));
  const double c2 = 1.0 - std::pow(b2, static_cast<double>(step_));
  for (std::size_t i = 0; i < grads.size(); ++i) {
    auto p = params[i].data();
    auto g = grads[i].data();
    auto m = m_[i].data();
    auto v = v_[i].data();
    for (std::size_t k = 0; k < p.size(); ++k) {
      const double gk = g[k];
      const double mk = b1 * m[k] + (1.0 - b1) * gk;
      const double vk = b2 * v[k] + (1.0 - b2) * gk * gk;
      m[k] = static_cast<T>(mk);
      v[k] = static_cast<T>(vk);
      const double update = lr * (mk / c1) / (std::sqrt(vk / c2) + options_.epsilon);
      p[k] = static_cast<T>(p[k] - update);
    }
  }
}

double linear_lr(std::int64_t step, std::int64_t total_steps, double lr0) {
  if (total_steps <= 0) throw Error("linear_lr: total_steps must be positive");
  if (step < 0 || step > total_steps) {
    throw Error(fmt::format("linear_lr: step {} outside [0, {}]", step, total_steps));
  }
  return lr0 * (1.0 - static_cast<double>(step) / static_cast<double>(total_steps));
}

template class Adam<float>;
template class Adam<double>;

}  // namespace msam::diff
