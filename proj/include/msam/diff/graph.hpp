// Copyright 2026 The MSAM Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string_view>
#include <vector>

#include "msam/diff/tensor.hpp"

namespace msam::diff {

// Handle to a node of a Graph. Only meaningful for the graph that made it.
struct Var {
  std::int32_t id = -1;
  bool valid() const { return id >= 0; }
};

// Logit written into masked positions before a softmax.
inline constexpr double kMaskedLogit = -1e9;

// Eager reverse-mode tape. Every operation computes its value immediately
// and records how to push gradients back to its inputs; backward() replays
// the tape in reverse creation order, which is a valid topological order.
//
// Operands are 2-D (rank-1 tensors are read as 1 x n rows). Gradients from
// several uses of one node accumulate additively.
template <typename T>
class Graph {
 public:
  using TensorT = Tensor<T>;

  Graph() = default;
  Graph(const Graph&) = delete;
  Graph& operator=(const Graph&) = delete;
  // Backward closures capture `this`, so graphs stay where they were built.
  Graph(Graph&&) = delete;
  Graph& operator=(Graph&&) = delete;

  // Leaves.
  Var constant(TensorT value);
  Var variable(TensorT value);
  // Borrows `value`; it must outlive the graph.
  Var parameter(const TensorT& value);

  const TensorT& value(Var v) const;
  // Zero tensor when no gradient reached `v`.
  TensorT grad(Var v) const;
  bool requires_grad(Var v) const;
  std::size_t size() const { return nodes_.size(); }
  std::string_view op_name(Var v) const;

  // Linear algebra.
  Var matmul(Var a, Var b);     // a (m x k) * b (k x n)
  Var matmul_nt(Var a, Var b);  // a (m x k) * b^T, b is (n x k)

  // Elementwise.
  Var add(Var a, Var b);
  Var sub(Var a, Var b);
  Var mul(Var a, Var b);
  Var add_row(Var a, Var row);  // broadcasts a 1 x n row over every row of a
  Var scale(Var a, T factor);
  Var tanh(Var a);
  Var sigmoid(Var a);
  Var relu(Var a);

  // Row-wise softmax; positions with mask == 0 get kMaskedLogit first.
  // An empty mask means no masking. Every row must keep one live position.
  Var softmax_rows(Var a, std::span<const std::uint8_t> mask = {});
  Var layer_norm_rows(Var x, Var gain, Var bias, T eps = T(1e-5));

  // Structure.
  Var gather_rows(Var table, std::span<const std::int32_t> ids);
  Var slice_cols(Var a, std::int64_t begin, std::int64_t end);
  Var slice_rows(Var a, std::int64_t begin, std::int64_t end);
  Var concat_cols(std::span<const Var> parts);
  Var concat_rows(std::span<const Var> parts);

  // Reductions.
  Var max_rows(Var a);   // 1 x n column maxima; ties route to the lowest row
  Var mean_rows(Var a);  // 1 x n column means
  Var row_dot(Var a, Var b);  // 1 x m, entry i = <a_i, b_i>
  Var sum(Var a);

  // Losses against constant targets; each returns a 1 x 1 sum.
  Var bce_with_logits(Var logits, std::span<const T> targets);
  Var squared_error(Var a, std::span<const T> targets);
  Var huber(Var a, std::span<const T> targets, T delta);

  // Reverse pass from a 1 x 1 output.
  void backward(Var output);

 private:
  struct Node {
    std::string_view op;
    TensorT own;
    const TensorT* borrowed = nullptr;
    TensorT grad;
    bool requires_grad = false;
    std::function<void()> backprop;

    const TensorT& value() const { return borrowed != nullptr ? *borrowed : own; }
  };

  const Node& node(Var v, std::string_view op) const;
  Var push(std::string_view op, TensorT value, bool requires_grad,
           std::function<void()> backprop = {});
  TensorT& grad_ref(std::int32_t id);
  [[noreturn]] void dim_error(std::string_view op, const std::string& detail) const;

  std::vector<Node> nodes_;
};

extern template class Graph<float>;
extern template class Graph<double>;

}  // namespace msam::diff
