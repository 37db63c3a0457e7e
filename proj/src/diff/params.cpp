// Copyright 2026 The MSAM Authors.
// SPDX-License-Identifier: Apache-2.0

#include "msam/diff/params.hpp"

#include <cmath>
#include <cstring>

namespace msam::diff {

template <typename T>
std::size_t ParameterSet<T>::add(const std::string& name, Tensor<T> value) {
  if (contains(name)) throw Error("duplicate parameter name '" + name + "'");
  index_.emplace(name, values_.size());
  names_.push_back(name);
  values_.push_back(std::move(value));
  return values_.size() - 1;
}

template <typename T>
std::size_t ParameterSet<T>::index_of(const std::string& name) const {
  auto it = index_.find(name);
  if (it == index_.end()) throw Error("unknown parameter '" + name + "'");
  return it->second;
}

template <typename T>
std::size_t ParameterSet<T>::element_count() const {
  std::size_t n = 0;
  for (const auto& v : values_) n += v.size();
  return n;
}

template <typename T>
std::vector<Tensor<T>> ParameterSet<T>::zeros_like() const {
  std::vector<Tensor<T>> out;
  out.reserve(values_.size());
  for (const auto& v : values_) out.emplace_back(v.dims(), T(0));
  return out;
}

template <typename T>
ParamBinding<T>::ParamBinding(Graph<T>& graph, const ParameterSet<T>& params)
    : graph_(graph), params_(params), bound_(params.size()) {}

template <typename T>
Var ParamBinding<T>::operator()(std::size_t index) {
  Var& v = bound_.at(index);
  if (!v.valid()) v = graph_.parameter(params_[index]);
  return v;
}

template <typename T>
void ParamBinding<T>::accumulate(std::vector<Tensor<T>>& grads) const {
  if (grads.size() != bound_.size()) {
    throw DimensionError("gradient buffer does not match parameter count");
  }
  for (std::size_t i = 0; i < bound_.size(); ++i) {
    if (!bound_[i].valid()) continue;
    const auto g = graph_.grad(bound_[i]);
    auto dst = grads[i].data();
    for (std::size_t k = 0; k < dst.size(); ++k) dst[k] += g[k];
  }
}

template <typename T>
Tensor<T> glorot_uniform(std::int64_t rows, std::int64_t cols, std::mt19937_64& rng) {
  const double a = std::sqrt(6.0 / static_cast<double>(rows + cols));
  std::uniform_real_distribution<double> dist(-a, a);
  Tensor<T> t = Tensor<T>::matrix(rows, cols);
  for (auto& x : t.data()) x = static_cast<T>(dist(rng));
  return t;
}

template <typename T>
Tensor<T> normal_tensor(std::int64_t rows, std::int64_t cols, double stddev,
                        std::mt19937_64& rng) {
  std::normal_distribution<double> dist(0.0, stddev);
  Tensor<T> t = Tensor<T>::matrix(rows, cols);
  for (auto& x : t.data()) x = static_cast<T>(dist(rng));
  return t;
}

template <typename T>
std::uint64_t hash_tensors(const std::vector<Tensor<T>>& tensors) {
  std::uint64_t h = 1469598103934665603ULL;
  auto mix = [&h](const void* p, std::size_t n) {
    const auto* bytes = static_cast<const unsigned char*>(p);
    for (std::size_t i = 0; i < n; ++i) {
      h ^= bytes[i];
      h *= 1099511628211ULL;
    }
  };
  for (const auto& t : tensors) {
    for (auto d : t.dims()) mix(&d, sizeof d);
    mix(t.data().data(), t.size() * sizeof(T));
  }
  return h;
}

template class ParameterSet<float>;
template class ParameterSet<double>;
template class ParamBinding<float>;
template class ParamBinding<double>;
template Tensor<float> glorot_uniform<float>(std::int64_t, std::int64_t, std::mt19937_64&);
template Tensor<double> glorot_uniform<double>(std::int64_t, std::int64_t, std::mt19937_64&);
template Tensor<float> normal_tensor<float>(std::int64_t, std::int64_t, double, std::mt19937_64&);
template Tensor<double> normal_tensor<double>(std::int64_t, std::int64_t, double, std::mt19937_64&);
template std::uint64_t hash_tensors<float>(const std::vector<Tensor<float>>&);
template std::uint64_t hash_tensors<double>(const std::vector<Tensor<double>>&);

}  // namespace msam::diff
