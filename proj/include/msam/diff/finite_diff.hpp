// Copyright 2026 The MSAM Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <functional>
#include <span>
#include <vector>

#include "msam/diff/graph.hpp"

namespace msam::diff {

// Builds a scalar in `graph` from the leaves bound to the given parameters.
using ScalarFunction = std::function<Var(Graph<double>&, std::span<const Var>)>;

// Compares reverse-mode gradients of `fn` against central differences and
// returns max |analytic - numeric| / max(1, |analytic|) over all entries.
// Runs in 64-bit; epsilon must lie in [1e-7, 1e-3].
double finite_diff_check(const ScalarFunction& fn, const std::vector<Tensor<double>>& params,
                         double epsilon = 1e-6);

}  // namespace msam::diff
