// Copyright 2026 The MSAM Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <unordered_map>
#include <vector>

#include "msam/diff/graph.hpp"

namespace msam::diff {

// Ordered, named collection of trainable tensors.
template <typename T>
class ParameterSet {
 public:
  // Registers a new tensor; names are unique.
  std::size_t add(const std::string& name, Tensor<T> value);
  std::size_t index_of(const std::string& name) const;
  bool contains(const std::string& name) const { return index_.count(name) > 0; }

  std::size_t size() const { return values_.size(); }
  const std::string& name(std::size_t i) const { return names_[i]; }
  Tensor<T>& operator[](std::size_t i) { return values_[i]; }
  const Tensor<T>& operator[](std::size_t i) const { return values_[i]; }
  std::vector<Tensor<T>>& values() { return values_; }
  const std::vector<Tensor<T>>& values() const { return values_; }
  std::size_t element_count() const;

  // Zero tensors shaped like every parameter.
  std::vector<Tensor<T>> zeros_like() const;

 private:
  std::vector<std::string> names_;
  std::vector<Tensor<T>> values_;
  std::unordered_map<std::string, std::size_t> index_;
};

// Lazily materialises parameters as graph leaves so that each parameter has
// one leaf per graph and all of its uses accumulate into one gradient.
template <typename T>
class ParamBinding {
 public:
  ParamBinding(Graph<T>& graph, const ParameterSet<T>& params);

  Var operator()(std::size_t index);
  Graph<T>& graph() { return graph_; }
  const ParameterSet<T>& params() const { return params_; }

  // Adds the gradients of every bound parameter into `grads`.
  void accumulate(std::vector<Tensor<T>>& grads) const;

 private:
  Graph<T>& graph_;
  const ParameterSet<T>& params_;
  std::vector<Var> bound_;
};

// Uniform(-a, a) with a = sqrt(6 / (fan_in + fan_out)).
template <typename T>
Tensor<T> glorot_uniform(std::int64_t rows, std::int64_t cols, std::mt19937_64& rng);

template <typename T>
Tensor<T> normal_tensor(std::int64_t rows, std::int64_t cols, double stddev,
                        std::mt19937_64& rng);

// FNV-1a over the raw bytes of every parameter; used to prove tensors stay frozen.
template <typename T>
std::uint64_t hash_tensors(const std::vector<Tensor<T>>& tensors);

extern template class ParameterSet<float>;
extern template class ParameterSet<double>;
extern template class ParamBinding<float>;
extern template class ParamBinding<double>;

}  // namespace msam::diff
