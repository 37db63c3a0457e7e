// Copyright 2026 The MSAM Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <numeric>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "msam/error.hpp"

namespace msam::diff {

using Dims = std::vector<std::int64_t>;

inline std::size_t element_count(const Dims& dims) {
  return std::accumulate(dims.begin(), dims.end(), std::size_t{1},
                         [](std::size_t acc, std::int64_t d) {
                           return acc * static_cast<std::size_t>(d);
                         });
}

std::string format_dims(const Dims& dims);

// Dense row-major tensor. Graph operations treat rank-1 tensors as 1 x n
// rows; higher ranks are only used for storage (e.g. checkpoints).
template <typename T>
class Tensor {
 public:
  using value_type = T;

  Tensor() = default;

  explicit Tensor(Dims dims, T fill = T(0)) : dims_(std::move(dims)) {
    check_dims();
    data_.assign(element_count(dims_), fill);
  }

  Tensor(Dims dims, std::vector<T> data)
      : dims_(std::move(dims)), data_(std::move(data)) {
    check_dims();
    if (data_.size() != element_count(dims_)) {
      throw DimensionError("tensor data length " + std::to_string(data_.size()) +
                           " does not match dims " + format_dims(dims_));
    }
  }

  static Tensor matrix(std::int64_t rows, std::int64_t cols, T fill = T(0)) {
    return Tensor({rows, cols}, fill);
  }
  static Tensor row(std::vector<T> values) {
    const auto n = static_cast<std::int64_t>(values.size());
    return Tensor({1, n}, std::move(values));
  }
  static Tensor scalar(T value) { return Tensor({1, 1}, std::vector<T>{value}); }

  const Dims& dims() const { return dims_; }
  std::size_t rank() const { return dims_.size(); }
  std::size_t size() const { return data_.size(); }
  bool empty() const { return data_.empty(); }

  std::int64_t rows() const {
    return dims_.size() >= 2 ? dims_[dims_.size() - 2] : 1;
  }
  std::int64_t cols() const { return dims_.empty() ? 0 : dims_.back(); }

  std::span<T> data() { return data_; }
  std::span<const T> data() const { return data_; }
  std::vector<T>& storage() { return data_; }
  const std::vector<T>& storage() const { return data_; }

  T& operator[](std::size_t i) { return data_[i]; }
  const T& operator[](std::size_t i) const { return data_[i]; }

  T& at(std::int64_t r, std::int64_t c) {
    return data_[static_cast<std::size_t>(r * cols() + c)];
  }
  const T& at(std::int64_t r, std::int64_t c) const {
    return data_[static_cast<std::size_t>(r * cols() + c)];
  }

  std::span<const T> row_span(std::int64_t r) const {
    return std::span<const T>(data_).subspan(static_cast<std::size_t>(r * cols()),
                                             static_cast<std::size_t>(cols()));
  }
  std::span<T> row_span(std::int64_t r) {
    return std::span<T>(data_).subspan(static_cast<std::size_t>(r * cols()),
                                       static_cast<std::size_t>(cols()));
  }

  bool same_shape(const Tensor& other) const {
    return rows() == other.rows() && cols() == other.cols() &&
           size() == other.size();
  }

  void fill(T value) { std::fill(data_.begin(), data_.end(), value); }

  template <typename U>
  Tensor<U> cast() const {
    return Tensor<U>(dims_, std::vector<U>(data_.begin(), data_.end()));
  }

  friend bool operator==(const Tensor& a, const Tensor& b) {
    return a.dims_ == b.dims_ && a.data_ == b.data_;
  }

 private:
  void check_dims() const {
    for (auto d : dims_) {
      if (d <= 0) {
        throw DimensionError("tensor dims must be positive, got " + format_dims(dims_));
      }
    }
  }

  Dims dims_;
  std::vector<T> data_;
};

template <typename T>
bool all_finite(std::span<const T> values);

extern template bool all_finite<float>(std::span<const float>);
extern template bool all_finite<double>(std::span<const double>);

}  // namespace msam::diff
