// Copyright 2026 The MSAM Authors.
// SPDX-License-Identifier: Apache-2.0

#include "msam/diff/finite_diff.hpp"

#include <algorithm>
#include <cmath>

namespace msam::diff {

namespace {

double evaluate(const ScalarFunction& fn, const std::vector<Tensor<double>>& params) {
  Graph<double> graph;
  std::vector<Var> leaves;
  leaves.reserve(params.size());
  for (const auto& p : params) leaves.push_back(graph.constant(p));
  const double value = graph.value(fn(graph, leaves))[0];
  if (!std::isfinite(value)) throw NumericError("finite_diff_check: non-finite function value");
  return value;
}

}  // namespace

double finite_diff_check(const ScalarFunction& fn, const std::vector<Tensor<double>>& params,
                         double epsilon) {
  if (!(epsilon >= 1e-7 && epsilon <= 1e-3)) {
    throw Error("finite_diff_check: epsilon must lie in [1e-7, 1e-3]");
  }
  std::vector<Tensor<double>> analytic;
  {
    Graph<double> graph;
    std::vector<Var> leaves;
    for (const auto& p : params) leaves.push_back(graph.variable(p));
    const Var out = fn(graph, leaves);
    if (!std::isfinite(graph.value(out)[0])) {
      throw NumericError("finite_diff_check: non-finite function value");
    }
    graph.backward(out);
    for (Var v : leaves) analytic.push_back(graph.grad(v));
  }

  double worst = 0.0;
  std::vector<Tensor<double>> probe = params;
  for (std::size_t i = 0; i < probe.size(); ++i) {
    for (std::size_t k = 0; k < probe[i].size(); ++k) {
      const double original = probe[i][k];
      probe[i][k] = original + epsilon;
      const double up = evaluate(fn, probe);
      probe[i][k] = original - epsilon;
      const double down = evaluate(fn, probe);
      probe[i][k] = original;
      const double numeric = (up - down) / (2.0 * epsilon);
      const double a = analytic[i][k];
      if (!std::isfinite(a)) throw NumericError("finite_diff_check: non-finite gradient");
      worst = std::max(worst, std::abs(a - numeric) / std::max(1.0, std::abs(a)));
    }
  }
  return worst;
}

}  // namespace msam::diff
