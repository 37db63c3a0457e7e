// Copyright 2026 The MSAM Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <vector>

#include "msam/diff/params.hpp"

namespace msam::diff {

struct AdamOptions {
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

// Adam with bias correction. Moments are kept per parameter tensor.
template <typename T>
class Adam {
 public:
  explicit Adam(const ParameterSet<T>& params, AdamOptions options = {});

  // Applies one update. A non-finite gradient aborts before any parameter
  // is modified.
  void step(ParameterSet<T>& params, const std::vector<Tensor<T>>& grads, double lr);

  std::int64_t steps() const { return step_; }
  const AdamOptions& options() const { return options_; }
  const std::vector<Tensor<T>>& first_moments() const { return m_; }
  const std::vector<Tensor<T>>& second_moments() const { return v_; }

 private:
  AdamOptions options_;
  std::vector<Tensor<T>> m_;
  std::vector<Tensor<T>> v_;
  std::int64_t step_ = 0;
};

// lr0 * (1 - step / total_steps); reaches 0 at the final step.
double linear_lr(std::int64_t step, std::int64_t total_steps, double lr0);

extern template class Adam<float>;
extern template class Adam<double>;

}  // namespace msam::diff
