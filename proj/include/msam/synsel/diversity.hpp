// Copyright 2026 The MSAM Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "msam/diff/tensor.hpp"

namespace msam::synsel {

// Symmetric N x N matrix of cosine distances with a zero diagonal.
class DistanceMatrix {
 public:
  DistanceMatrix() = default;
  DistanceMatrix(std::size_t n, std::vector<double> values);

  std::size_t size() const { return n_; }
  double operator()(std::size_t i, std::size_t j) const { return d_[i * n_ + j]; }
  std::span<const double> values() const { return d_; }

 private:
  std::size_t n_ = 0;
  std::vector<double> d_;
};

// Boolean membership vector with exactly `target` entries set.
struct Selection {
  std::vector<std::uint8_t> chosen;
  int target = 0;

  std::vector<int> indices() const;
  int count() const;
};

// N <= this limit is solved exactly.
inline constexpr std::size_t kExactLimit = 24;

// d_ij = 1 - cos(v_i, v_j) over the rows of `vectors`; zero-norm rows are an error.
DistanceMatrix cosine_distance_matrix(const diff::Tensor<double>& vectors);

// Sum of d_ij over selected pairs i < j, accumulated in index order.
double diversity_objective(const DistanceMatrix& d, std::span<const int> indices);

// Maximum diversity subset of size m by depth-first branch-and-bound over
// index-ordered subsets. Among optimal subsets the lexicographically
// smallest index list is returned.
Selection select_exact(const DistanceMatrix& d, int m);

// Seeds with the farthest pair, then adds the element with the largest
// distance sum to the current set. Ties go to the lowest index.
Selection select_greedy(const DistanceMatrix& d, int m);

// Uniform subset of size m (ablation baseline).
Selection select_random(std::size_t n, int m, std::mt19937_64& rng);

enum class SelectionMode { kExact, kGreedy, kRandom };

SelectionMode parse_selection_mode(const std::string& name);
std::string to_string(SelectionMode mode);

}  // namespace msam::synsel
