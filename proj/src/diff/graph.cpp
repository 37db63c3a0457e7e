// Copyright 2026 The MSAM Authors.
// SPDX-License-Identifier: Apache-2.0

#include "msam/diff/graph.hpp"

#include <fmt/format.h>

#include <Eigen/Core>
#include <algorithm>
#include <cmath>
#include <limits>

namespace msam::diff {

std::string format_dims(const Dims& dims) {
  std::string out = "(";
  for (std::size_t i = 0; i < dims.size(); ++i) {
    if (i > 0) out += "x";
    out += std::to_string(dims[i]);
  }
  return out + ")";
}

template <typename T>
bool all_finite(std::span<const T> values) {
  return std::all_of(values.begin(), values.end(),
                     [](T v) { return std::isfinite(v); });
}

template bool all_finite<float>(std::span<const float>);
template bool all_finite<double>(std::span<const double>);

namespace {

template <typename T>
using RowMatrix = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

// Reductions are written as plain loops: Eigen's vectorized reductions over
// unaligned maps peel to an aligned address, so the summation order (and the
// last bits of the result) would depend on where the buffer was allocated.
template <typename T>
Eigen::Map<RowMatrix<T>> as_matrix(Tensor<T>& t) {
  return Eigen::Map<RowMatrix<T>>(t.data().data(), t.rows(), t.cols());
}

template <typename T>
Eigen::Map<const RowMatrix<T>> as_matrix(const Tensor<T>& t) {
  return Eigen::Map<const RowMatrix<T>>(t.data().data(), t.rows(), t.cols());
}

template <typename T>
T stable_sigmoid(T z) {
  if (z >= 0) return T(1) / (T(1) + std::exp(-z));
  const T e = std::exp(z);
  return e / (T(1) + e);
}

}  // namespace

template <typename T>
void Graph<T>::dim_error(std::string_view op, const std::string& detail) const {
  throw DimensionError(
      fmt::format("node {} ({}): {}", nodes_.size(), op, detail));
}

template <typename T>
const typename Graph<T>::Node& Graph<T>::node(Var v, std::string_view op) const {
  if (!v.valid() || static_cast<std::size_t>(v.id) >= nodes_.size()) {
    throw Error(fmt::format("{}: variable {} does not belong to this graph", op, v.id));
  }
  return nodes_[static_cast<std::size_t>(v.id)];
}

template <typename T>
Var Graph<T>::push(std::string_view op, TensorT value, bool requires_grad,
                   std::function<void()> backprop) {
  Node n;
  n.op = op;
  n.own = std::move(value);
  n.requires_grad = requires_grad;
  if (requires_grad) n.backprop = std::move(backprop);
  nodes_.push_back(std::move(n));
  return Var{static_cast<std::int32_t>(nodes_.size() - 1)};
}

template <typename T>
typename Graph<T>::TensorT& Graph<T>::grad_ref(std::int32_t id) {
  Node& n = nodes_[static_cast<std::size_t>(id)];
  if (n.grad.empty()) n.grad = TensorT(n.value().dims(), T(0));
  return n.grad;
}

template <typename T>
Var Graph<T>::constant(TensorT value) {
  return push("constant", std::move(value), false);
}

template <typename T>
Var Graph<T>::variable(TensorT value) {
  return push("variable", std::move(value), true, [] {});
}

template <typename T>
Var Graph<T>::parameter(const TensorT& value) {
  Node n;
  n.op = "parameter";
  n.borrowed = &value;
  n.requires_grad = true;
  n.backprop = [] {};
  nodes_.push_back(std::move(n));
  return Var{static_cast<std::int32_t>(nodes_.size() - 1)};
}

template <typename T>
const typename Graph<T>::TensorT& Graph<T>::value(Var v) const {
  return node(v, "value").value();
}

template <typename T>
typename Graph<T>::TensorT Graph<T>::grad(Var v) const {
  const Node& n = node(v, "grad");
  if (n.grad.empty()) return TensorT(n.value().dims(), T(0));
  return n.grad;
}

template <typename T>
bool Graph<T>::requires_grad(Var v) const {
  return node(v, "requires_grad").requires_grad;
}

template <typename T>
std::string_view Graph<T>::op_name(Var v) const {
  return node(v, "op_name").op;
}

// ---------------------------------------------------------------------------
// Linear algebra

template <typename T>
Var Graph<T>::matmul(Var a, Var b) {
  const auto& A = node(a, "matmul").value();
  const auto& B = node(b, "matmul").value();
  if (A.cols() != B.rows()) {
    dim_error("matmul", fmt::format("{} * {}", format_dims(A.dims()), format_dims(B.dims())));
  }
  TensorT out = TensorT::matrix(A.rows(), B.cols());
  as_matrix(out).noalias() = as_matrix(A) * as_matrix(B);
  const bool rg = nodes_[a.id].requires_grad || nodes_[b.id].requires_grad;
  const std::int32_t self = static_cast<std::int32_t>(nodes_.size());
  return push("matmul", std::move(out), rg, [this, a, b, self] {
    const auto& G = nodes_[self].grad;
    if (nodes_[a.id].requires_grad) {
      as_matrix(grad_ref(a.id)).noalias() += as_matrix(G) * as_matrix(value(b)).transpose();
    }
    if (nodes_[b.id].requires_grad) {
      as_matrix(grad_ref(b.id)).noalias() += as_matrix(value(a)).transpose() * as_matrix(G);
    }
  });
}

template <typename T>
Var Graph<T>::matmul_nt(Var a, Var b) {
  const auto& A = node(a, "matmul_nt").value();
  const auto& B = node(b, "matmul_nt").value();
  if (A.cols() != B.cols()) {
    dim_error("matmul_nt",
              fmt::format("{} * {}^T", format_dims(A.dims()), format_dims(B.dims())));
  }
  TensorT out = TensorT::matrix(A.rows(), B.rows());
  as_matrix(out).noalias() = as_matrix(A) * as_matrix(B).transpose();
  const bool rg = nodes_[a.id].requires_grad || nodes_[b.id].requires_grad;
  const std::int32_t self = static_cast<std::int32_t>(nodes_.size());
  return push("matmul_nt", std::move(out), rg, [this, a, b, self] {
    const auto& G = nodes_[self].grad;
    if (nodes_[a.id].requires_grad) {
      as_matrix(grad_ref(a.id)).noalias() += as_matrix(G) * as_matrix(value(b));
    }
    if (nodes_[b.id].requires_grad) {
      as_matrix(grad_ref(b.id)).noalias() += as_matrix(G).transpose() * as_matrix(value(a));
    }
  });
}

// ---------------------------------------------------------------------------
// Elementwise

template <typename T>
Var Graph<T>::add(Var a, Var b) {
  const auto& A = node(a, "add").value();
  const auto& B = node(b, "add").value();
  if (!A.same_shape(B)) {
    dim_error("add", format_dims(A.dims()) + " vs " + format_dims(B.dims()));
  }
  TensorT out = A;
  for (std::size_t i = 0; i < out.size(); ++i) out[i] += B[i];
  const bool rg = nodes_[a.id].requires_grad || nodes_[b.id].requires_grad;
  const std::int32_t self = static_cast<std::int32_t>(nodes_.size());
  return push("add", std::move(out), rg, [this, a, b, self] {
    const auto& G = nodes_[self].grad;
    for (Var v : {a, b}) {
      if (!nodes_[v.id].requires_grad) continue;
      auto& g = grad_ref(v.id);
      for (std::size_t i = 0; i < g.size(); ++i) g[i] += G[i];
    }
  });
}

template <typename T>
Var Graph<T>::sub(Var a, Var b) {
  const auto& A = node(a, "sub").value();
  const auto& B = node(b, "sub").value();
  if (!A.same_shape(B)) {
    dim_error("sub", format_dims(A.dims()) + " vs " + format_dims(B.dims()));
  }
  TensorT out = A;
  for (std::size_t i = 0; i < out.size(); ++i) out[i] -= B[i];
  const bool rg = nodes_[a.id].requires_grad || nodes_[b.id].requires_grad;
  const std::int32_t self = static_cast<std::int32_t>(nodes_.size());
  return push("sub", std::move(out), rg, [this, a, b, self] {
    const auto& G = nodes_[self].grad;
    if (nodes_[a.id].requires_grad) {
      auto& g = grad_ref(a.id);
      for (std::size_t i = 0; i < g.size(); ++i) g[i] += G[i];
    }
    if (nodes_[b.id].requires_grad) {
      auto& g = grad_ref(b.id);
      for (std::size_t i = 0; i < g.size(); ++i) g[i] -= G[i];
    }
  });
}

template <typename T>
Var Graph<T>::mul(Var a, Var b) {
  const auto& A = node(a, "mul").value();
  const auto& B = node(b, "mul").value();
  if (!A.same_shape(B)) {
    dim_error("mul", format_dims(A.dims()) + " vs " + format_dims(B.dims()));
  }
  TensorT out = A;
  for (std::size_t i = 0; i < out.size(); ++i) out[i] *= B[i];
  const bool rg = nodes_[a.id].requires_grad || nodes_[b.id].requires_grad;
  const std::int32_t self = static_cast<std::int32_t>(nodes_.size());
  return push("mul", std::move(out), rg, [this, a, b, self] {
    const auto& G = nodes_[self].grad;
    if (nodes_[a.id].requires_grad) {
      auto& g = grad_ref(a.id);
      const auto& Bv = value(b);
      for (std::size_t i = 0; i < g.size(); ++i) g[i] += G[i] * Bv[i];
    }
    if (nodes_[b.id].requires_grad) {
      auto& g = grad_ref(b.id);
      const auto& Av = value(a);
      for (std::size_t i = 0; i < g.size(); ++i) g[i] += G[i] * Av[i];
    }
  });
}

template <typename T>
Var Graph<T>::add_row(Var a, Var row) {
  const auto& A = node(a, "add_row").value();
  const auto& R = node(row, "add_row").value();
  if (R.rows() != 1 || R.cols() != A.cols()) {
    dim_error("add_row", format_dims(A.dims()) + " + row " + format_dims(R.dims()));
  }
  TensorT out = A;
  as_matrix(out).rowwise() += as_matrix(R).row(0);
  const bool rg = nodes_[a.id].requires_grad || nodes_[row.id].requires_grad;
  const std::int32_t self = static_cast<std::int32_t>(nodes_.size());
  return push("add_row", std::move(out), rg, [this, a, row, self] {
    const auto& G = nodes_[self].grad;
    if (nodes_[a.id].requires_grad) {
      auto& g = grad_ref(a.id);
      for (std::size_t i = 0; i < g.size(); ++i) g[i] += G[i];
    }
    if (nodes_[row.id].requires_grad) {
      auto& g = grad_ref(row.id);
      const auto cols = static_cast<std::size_t>(G.cols());
      for (std::size_t i = 0; i < G.size(); ++i) g[i % cols] += G[i];
    }
  });
}

template <typename T>
Var Graph<T>::scale(Var a, T factor) {
  const auto& A = node(a, "scale").value();
  TensorT out = A;
  for (auto& x : out.data()) x *= factor;
  const std::int32_t self = static_cast<std::int32_t>(nodes_.size());
  return push("scale", std::move(out), nodes_[a.id].requires_grad, [this, a, self, factor] {
    const auto& G = nodes_[self].grad;
    auto& g = grad_ref(a.id);
    for (std::size_t i = 0; i < g.size(); ++i) g[i] += G[i] * factor;
  });
}

template <typename T>
Var Graph<T>::tanh(Var a) {
  TensorT out = node(a, "tanh").value();
  for (auto& x : out.data()) x = std::tanh(x);
  const std::int32_t self = static_cast<std::int32_t>(nodes_.size());
  return push("tanh", std::move(out), nodes_[a.id].requires_grad, [this, a, self] {
    const auto& G = nodes_[self].grad;
    const auto& Y = nodes_[self].value();
    auto& g = grad_ref(a.id);
    for (std::size_t i = 0; i < g.size(); ++i) g[i] += G[i] * (T(1) - Y[i] * Y[i]);
  });
}

template <typename T>
Var Graph<T>::sigmoid(Var a) {
  TensorT out = node(a, "sigmoid").value();
  for (auto& x : out.data()) x = stable_sigmoid(x);
  const std::int32_t self = static_cast<std::int32_t>(nodes_.size());
  return push("sigmoid", std::move(out), nodes_[a.id].requires_grad, [this, a, self] {
    const auto& G = nodes_[self].grad;
    const auto& Y = nodes_[self].value();
    auto& g = grad_ref(a.id);
    for (std::size_t i = 0; i < g.size(); ++i) g[i] += G[i] * Y[i] * (T(1) - Y[i]);
  });
}

template <typename T>
Var Graph<T>::relu(Var a) {
  TensorT out = node(a, "relu").value();
  for (auto& x : out.data()) x = x > T(0) ? x : T(0);
  const std::int32_t self = static_cast<std::int32_t>(nodes_.size());
  return push("relu", std::move(out), nodes_[a.id].requires_grad, [this, a, self] {
    const auto& G = nodes_[self].grad;
    const auto& X = value(a);
    auto& g = grad_ref(a.id);
    for (std::size_t i = 0; i < g.size(); ++i) {
      if (X[i] > T(0)) g[i] += G[i];
    }
  });
}

template <typename T>
Var Graph<T>::softmax_rows(Var a, std::span<const std::uint8_t> mask) {
  const auto& A = node(a, "softmax_rows").value();
  const auto rows = A.rows();
  const auto cols = A.cols();
  if (!mask.empty() && static_cast<std::int64_t>(mask.size()) != cols) {
    dim_error("softmax_rows",
              fmt::format("mask length {} for {} columns", mask.size(), cols));
  }
  if (!mask.empty() && std::none_of(mask.begin(), mask.end(), [](auto m) { return m != 0; })) {
    dim_error("softmax_rows", "every position is masked");
  }
  std::vector<std::uint8_t> keep(mask.begin(), mask.end());
  TensorT out = A;
  for (std::int64_t r = 0; r < rows; ++r) {
    auto row = out.row_span(r);
    if (!keep.empty()) {
      for (std::int64_t c = 0; c < cols; ++c) {
        if (keep[c] == 0) row[c] = static_cast<T>(kMaskedLogit);
      }
    }
    const T peak = *std::max_element(row.begin(), row.end());
    T total = 0;
    for (auto& x : row) {
      x = std::exp(x - peak);
      total += x;
    }
    for (auto& x : row) x /= total;
  }
  const std::int32_t self = static_cast<std::int32_t>(nodes_.size());
  return push("softmax_rows", std::move(out), nodes_[a.id].requires_grad,
              [this, a, self, rows, keep = std::move(keep)] {
                const auto& G = nodes_[self].grad;
                const auto& Y = nodes_[self].value();
                auto& g = grad_ref(a.id);
                for (std::int64_t r = 0; r < rows; ++r) {
                  const auto y = Y.row_span(r);
                  const auto gy = G.row_span(r);
                  auto gx = g.row_span(r);
                  T dot = 0;
                  for (std::size_t c = 0; c < y.size(); ++c) dot += gy[c] * y[c];
                  for (std::size_t c = 0; c < y.size(); ++c) {
                    if (!keep.empty() && keep[c] == 0) continue;
                    gx[c] += y[c] * (gy[c] - dot);
                  }
                }
              });
}

template <typename T>
Var Graph<T>::layer_norm_rows(Var x, Var gain, Var bias, T eps) {
  const auto& X = node(x, "layer_norm_rows").value();
  const auto& Gn = node(gain, "layer_norm_rows").value();
  const auto& Bs = node(bias, "layer_norm_rows").value();
  const auto rows = X.rows();
  const auto cols = X.cols();
  if (Gn.rows() != 1 || Gn.cols() != cols || Bs.rows() != 1 || Bs.cols() != cols) {
    dim_error("layer_norm_rows", format_dims(X.dims()) + " with gain " +
                                     format_dims(Gn.dims()) + " bias " + format_dims(Bs.dims()));
  }
  TensorT normalized = X;
  std::vector<T> inv_std(static_cast<std::size_t>(rows));
  TensorT out = X;
  for (std::int64_t r = 0; r < rows; ++r) {
    auto xr = X.row_span(r);
    T mean = 0;
    for (auto v : xr) mean += v;
    mean /= static_cast<T>(cols);
    T var = 0;
    for (auto v : xr) var += (v - mean) * (v - mean);
    var /= static_cast<T>(cols);
    const T inv = T(1) / std::sqrt(var + eps);
    inv_std[static_cast<std::size_t>(r)] = inv;
    auto nr = normalized.row_span(r);
    auto orow = out.row_span(r);
    for (std::int64_t c = 0; c < cols; ++c) {
      nr[c] = (xr[c] - mean) * inv;
      orow[c] = nr[c] * Gn[static_cast<std::size_t>(c)] + Bs[static_cast<std::size_t>(c)];
    }
  }
  const bool rg = nodes_[x.id].requires_grad || nodes_[gain.id].requires_grad ||
                  nodes_[bias.id].requires_grad;
  const std::int32_t self = static_cast<std::int32_t>(nodes_.size());
  return push(
      "layer_norm_rows", std::move(out), rg,
      [this, x, gain, bias, self, rows, cols, normalized = std::move(normalized),
       inv_std = std::move(inv_std)] {
        const auto& G = nodes_[self].grad;
        const auto& Gn = value(gain);
        if (nodes_[gain.id].requires_grad || nodes_[bias.id].requires_grad) {
          for (std::int64_t r = 0; r < rows; ++r) {
            const auto gr = G.row_span(r);
            const auto nr = normalized.row_span(r);
            if (nodes_[gain.id].requires_grad) {
              auto& gg = grad_ref(gain.id);
              for (std::int64_t c = 0; c < cols; ++c) gg[static_cast<std::size_t>(c)] += gr[c] * nr[c];
            }
            if (nodes_[bias.id].requires_grad) {
              auto& gb = grad_ref(bias.id);
              for (std::int64_t c = 0; c < cols; ++c) gb[static_cast<std::size_t>(c)] += gr[c];
            }
          }
        }
        if (!nodes_[x.id].requires_grad) return;
        auto& gx = grad_ref(x.id);
        std::vector<T> dn(static_cast<std::size_t>(cols));
        for (std::int64_t r = 0; r < rows; ++r) {
          const auto gr = G.row_span(r);
          const auto nr = normalized.row_span(r);
          T sum_dn = 0;
          T sum_dn_n = 0;
          for (std::int64_t c = 0; c < cols; ++c) {
            dn[c] = gr[c] * Gn[static_cast<std::size_t>(c)];
            sum_dn += dn[c];
            sum_dn_n += dn[c] * nr[c];
          }
          const T inv = inv_std[static_cast<std::size_t>(r)];
          const T n = static_cast<T>(cols);
          auto gxr = gx.row_span(r);
          for (std::int64_t c = 0; c < cols; ++c) {
            gxr[c] += inv / n * (n * dn[c] - sum_dn - nr[c] * sum_dn_n);
          }
        }
      });
}

// ---------------------------------------------------------------------------
// Structure

template <typename T>
Var Graph<T>::gather_rows(Var table, std::span<const std::int32_t> ids) {
  const auto& W = node(table, "gather_rows").value();
  const auto cols = W.cols();
  if (ids.empty()) dim_error("gather_rows", "no ids");
  for (auto id : ids) {
    if (id < 0 || id >= W.rows()) {
      dim_error("gather_rows", fmt::format("id {} outside table with {} rows", id, W.rows()));
    }
  }
  TensorT out = TensorT::matrix(static_cast<std::int64_t>(ids.size()), cols);
  for (std::size_t i = 0; i < ids.size(); ++i) {
    std::copy_n(W.row_span(ids[i]).begin(), cols, out.row_span(static_cast<std::int64_t>(i)).begin());
  }
  std::vector<std::int32_t> idv(ids.begin(), ids.end());
  const std::int32_t self = static_cast<std::int32_t>(nodes_.size());
  return push("gather_rows", std::move(out), nodes_[table.id].requires_grad,
              [this, table, self, idv = std::move(idv)] {
                const auto& G = nodes_[self].grad;
                auto& g = grad_ref(table.id);
                for (std::size_t i = 0; i < idv.size(); ++i) {
                  auto src = G.row_span(static_cast<std::int64_t>(i));
                  auto dst = g.row_span(idv[i]);
                  for (std::size_t c = 0; c < src.size(); ++c) dst[c] += src[c];
                }
              });
}

template <typename T>
Var Graph<T>::slice_cols(Var a, std::int64_t begin, std::int64_t end) {
  const auto& A = node(a, "slice_cols").value();
  if (begin < 0 || end > A.cols() || begin >= end) {
    dim_error("slice_cols", fmt::format("[{}, {}) of {}", begin, end, format_dims(A.dims())));
  }
  TensorT out = TensorT::matrix(A.rows(), end - begin);
  as_matrix(out) = as_matrix(A).middleCols(begin, end - begin);
  const std::int32_t self = static_cast<std::int32_t>(nodes_.size());
  return push("slice_cols", std::move(out), nodes_[a.id].requires_grad,
              [this, a, self, begin, end] {
                as_matrix(grad_ref(a.id)).middleCols(begin, end - begin) +=
                    as_matrix(nodes_[self].grad);
              });
}

template <typename T>
Var Graph<T>::slice_rows(Var a, std::int64_t begin, std::int64_t end) {
  const auto& A = node(a, "slice_rows").value();
  if (begin < 0 || end > A.rows() || begin >= end) {
    dim_error("slice_rows", fmt::format("[{}, {}) of {}", begin, end, format_dims(A.dims())));
  }
  TensorT out = TensorT::matrix(end - begin, A.cols());
  as_matrix(out) = as_matrix(A).middleRows(begin, end - begin);
  const std::int32_t self = static_cast<std::int32_t>(nodes_.size());
  return push("slice_rows", std::move(out), nodes_[a.id].requires_grad,
              [this, a, self, begin, end] {
                as_matrix(grad_ref(a.id)).middleRows(begin, end - begin) +=
                    as_matrix(nodes_[self].grad);
              });
}

template <typename T>
Var Graph<T>::concat_cols(std::span<const Var> parts) {
  if (parts.empty()) dim_error("concat_cols", "no inputs");
  const auto rows = node(parts[0], "concat_cols").value().rows();
  std::int64_t cols = 0;
  bool rg = false;
  for (Var p : parts) {
    const auto& P = node(p, "concat_cols").value();
    if (P.rows() != rows) {
      dim_error("concat_cols", fmt::format("row count {} vs {}", P.rows(), rows));
    }
    cols += P.cols();
    rg = rg || nodes_[p.id].requires_grad;
  }
  TensorT out = TensorT::matrix(rows, cols);
  std::int64_t offset = 0;
  for (Var p : parts) {
    const auto& P = value(p);
    as_matrix(out).middleCols(offset, P.cols()) = as_matrix(P);
    offset += P.cols();
  }
  std::vector<Var> pv(parts.begin(), parts.end());
  const std::int32_t self = static_cast<std::int32_t>(nodes_.size());
  return push("concat_cols", std::move(out), rg, [this, self, pv = std::move(pv)] {
    std::int64_t offset = 0;
    for (Var p : pv) {
      const auto width = value(p).cols();
      if (nodes_[p.id].requires_grad) {
        as_matrix(grad_ref(p.id)) += as_matrix(nodes_[self].grad).middleCols(offset, width);
      }
      offset += width;
    }
  });
}

template <typename T>
Var Graph<T>::concat_rows(std::span<const Var> parts) {
  if (parts.empty()) dim_error("concat_rows", "no inputs");
  const auto cols = node(parts[0], "concat_rows").value().cols();
  std::int64_t rows = 0;
  bool rg = false;
  for (Var p : parts) {
    const auto& P = node(p, "concat_rows").value();
    if (P.cols() != cols) {
      dim_error("concat_rows", fmt::format("column count {} vs {}", P.cols(), cols));
    }
    rows += P.rows();
    rg = rg || nodes_[p.id].requires_grad;
  }
  TensorT out = TensorT::matrix(rows, cols);
  std::int64_t offset = 0;
  for (Var p : parts) {
    const auto& P = value(p);
    as_matrix(out).middleRows(offset, P.rows()) = as_matrix(P);
    offset += P.rows();
  }
  std::vector<Var> pv(parts.begin(), parts.end());
  const std::int32_t self = static_cast<std::int32_t>(nodes_.size());
  return push("concat_rows", std::move(out), rg, [this, self, pv = std::move(pv)] {
    std::int64_t offset = 0;
    for (Var p : pv) {
      const auto height = value(p).rows();
      if (nodes_[p.id].requires_grad) {
        as_matrix(grad_ref(p.id)) += as_matrix(nodes_[self].grad).middleRows(offset, height);
      }
      offset += height;
    }
  });
}

// ---------------------------------------------------------------------------
// Reductions

template <typename T>
Var Graph<T>::max_rows(Var a) {
  const auto& A = node(a, "max_rows").value();
  const auto rows = A.rows();
  const auto cols = A.cols();
  TensorT out = TensorT::matrix(1, cols);
  std::vector<std::int64_t> arg(static_cast<std::size_t>(cols), 0);
  for (std::int64_t c = 0; c < cols; ++c) {
    T best = A.at(0, c);
    for (std::int64_t r = 1; r < rows; ++r) {
      if (A.at(r, c) > best) {
        best = A.at(r, c);
        arg[static_cast<std::size_t>(c)] = r;
      }
    }
    out.at(0, c) = best;
  }
  const std::int32_t self = static_cast<std::int32_t>(nodes_.size());
  return push("max_rows", std::move(out), nodes_[a.id].requires_grad,
              [this, a, self, arg = std::move(arg)] {
                const auto& G = nodes_[self].grad;
                auto& g = grad_ref(a.id);
                for (std::size_t c = 0; c < arg.size(); ++c) {
                  g.at(arg[c], static_cast<std::int64_t>(c)) += G[c];
                }
              });
}

template <typename T>
Var Graph<T>::mean_rows(Var a) {
  const auto& A = node(a, "mean_rows").value();
  const auto rows = A.rows();
  TensorT out = TensorT::matrix(1, A.cols());
  const auto cols = static_cast<std::size_t>(A.cols());
  for (std::size_t i = 0; i < A.size(); ++i) out[i % cols] += A[i];
  for (auto& x : out.data()) x /= static_cast<T>(rows);
  const std::int32_t self = static_cast<std::int32_t>(nodes_.size());
  return push("mean_rows", std::move(out), nodes_[a.id].requires_grad, [this, a, self, rows] {
    as_matrix(grad_ref(a.id)).rowwise() +=
        as_matrix(nodes_[self].grad).row(0) / static_cast<T>(rows);
  });
}

template <typename T>
Var Graph<T>::row_dot(Var a, Var b) {
  const auto& A = node(a, "row_dot").value();
  const auto& B = node(b, "row_dot").value();
  if (!A.same_shape(B)) {
    dim_error("row_dot", format_dims(A.dims()) + " vs " + format_dims(B.dims()));
  }
  TensorT out = TensorT::matrix(1, A.rows());
  const auto cols = static_cast<std::size_t>(A.cols());
  for (std::size_t i = 0; i < A.size(); ++i) out[i / cols] += A[i] * B[i];
  const bool rg = nodes_[a.id].requires_grad || nodes_[b.id].requires_grad;
  const std::int32_t self = static_cast<std::int32_t>(nodes_.size());
  return push("row_dot", std::move(out), rg, [this, a, b, self] {
    const auto g = as_matrix(nodes_[self].grad).row(0).transpose();
    if (nodes_[a.id].requires_grad) {
      as_matrix(grad_ref(a.id)).array() += as_matrix(value(b)).array().colwise() * g.array();
    }
    if (nodes_[b.id].requires_grad) {
      as_matrix(grad_ref(b.id)).array() += as_matrix(value(a)).array().colwise() * g.array();
    }
  });
}

template <typename T>
Var Graph<T>::sum(Var a) {
  const auto& A = node(a, "sum").value();
  T total = 0;
  for (auto v : A.data()) total += v;
  const std::int32_t self = static_cast<std::int32_t>(nodes_.size());
  return push("sum", TensorT::scalar(total), nodes_[a.id].requires_grad, [this, a, self] {
    const T g0 = nodes_[self].grad[0];
    for (auto& g : grad_ref(a.id).data()) g += g0;
  });
}

template <typename T>
Var Graph<T>::bce_with_logits(Var logits, std::span<const T> targets) {
  const auto& Z = node(logits, "bce_with_logits").value();
  if (Z.size() != targets.size()) {
    dim_error("bce_with_logits",
              fmt::format("{} logits vs {} targets", Z.size(), targets.size()));
  }
  T total = 0;
  for (std::size_t i = 0; i < Z.size(); ++i) {
    const T z = Z[i];
    const T y = targets[i];
    if (y != T(0) && y != T(1)) {
      dim_error("bce_with_logits", fmt::format("target {} is not binary", y));
    }
    total += std::max(z, T(0)) - z * y + std::log1p(std::exp(-std::abs(z)));
  }
  std::vector<T> tv(targets.begin(), targets.end());
  const std::int32_t self = static_cast<std::int32_t>(nodes_.size());
  return push("bce_with_logits", TensorT::scalar(total), nodes_[logits.id].requires_grad,
              [this, logits, self, tv = std::move(tv)] {
                const T g0 = nodes_[self].grad[0];
                const auto& Z = value(logits);
                auto& g = grad_ref(logits.id);
                for (std::size_t i = 0; i < tv.size(); ++i) {
                  g[i] += g0 * (stable_sigmoid(Z[i]) - tv[i]);
                }
              });
}

template <typename T>
Var Graph<T>::squared_error(Var a, std::span<const T> targets) {
  const auto& A = node(a, "squared_error").value();
  if (A.size() != targets.size()) {
    dim_error("squared_error", fmt::format("{} values vs {} targets", A.size(), targets.size()));
  }
  T total = 0;
  for (std::size_t i = 0; i < A.size(); ++i) total += (A[i] - targets[i]) * (A[i] - targets[i]);
  std::vector<T> tv(targets.begin(), targets.end());
  const std::int32_t self = static_cast<std::int32_t>(nodes_.size());
  return push("squared_error", TensorT::scalar(total), nodes_[a.id].requires_grad,
              [this, a, self, tv = std::move(tv)] {
                const T g0 = nodes_[self].grad[0];
                const auto& A = value(a);
                auto& g = grad_ref(a.id);
                for (std::size_t i = 0; i < tv.size(); ++i) g[i] += g0 * T(2) * (A[i] - tv[i]);
              });
}

template <typename T>
Var Graph<T>::huber(Var a, std::span<const T> targets, T delta) {
  const auto& A = node(a, "huber").value();
  if (A.size() != targets.size()) {
    dim_error("huber", fmt::format("{} values vs {} targets", A.size(), targets.size()));
  }
  if (!(delta > T(0))) dim_error("huber", "delta must be positive");
  T total = 0;
  for (std::size_t i = 0; i < A.size(); ++i) {
    const T d = std::abs(A[i] - targets[i]);
    total += d < delta ? T(0.5) * d * d : delta * (d - T(0.5) * delta);
  }
  std::vector<T> tv(targets.begin(), targets.end());
  const std::int32_t self = static_cast<std::int32_t>(nodes_.size());
  return push("huber", TensorT::scalar(total), nodes_[a.id].requires_grad,
              [this, a, self, delta, tv = std::move(tv)] {
                const T g0 = nodes_[self].grad[0];
                const auto& A = value(a);
                auto& g = grad_ref(a.id);
                for (std::size_t i = 0; i < tv.size(); ++i) {
                  const T r = A[i] - tv[i];
                  const T slope = std::abs(r) < delta ? r : (r > 0 ? delta : -delta);
                  g[i] += g0 * slope;
                }
              });
}

// ---------------------------------------------------------------------------

template <typename T>
void Graph<T>::backward(Var output) {
  if (nodes_.empty()) throw Error("backward: the graph has no forward pass recorded");
  const Node& out = node(output, "backward");
  if (out.value().size() != 1) {
    throw DimensionError(fmt::format("backward: output {} is not a scalar",
                                     format_dims(out.value().dims())));
  }
  if (!out.requires_grad) return;
  grad_ref(output.id)[0] += T(1);
  for (auto i = output.id; i >= 0; --i) {
    Node& n = nodes_[static_cast<std::size_t>(i)];
    if (!n.requires_grad || n.grad.empty() || !n.backprop) continue;
    n.backprop();
  }
}

template class Graph<float>;
template class Graph<double>;

}  // namespace msam::diff
