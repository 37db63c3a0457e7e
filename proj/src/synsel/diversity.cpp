// Copyright 2026 The MSAM Authors.
// SPDX-License-Identifier: Apache-2.0

#include "msam/synsel/diversity.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>

#include "msam/error.hpp"

namespace msam::synsel {

DistanceMatrix::DistanceMatrix(std::size_t n, std::vector<double> values)
    : n_(n), d_(std::move(values)) {
  if (d_.size() != n * n) throw DimensionError("distance matrix must be N x N");
}

std::vector<int> Selection::indices() const {
  std::vector<int> out;
  for (std::size_t i = 0; i < chosen.size(); ++i) {
    if (chosen[i] != 0) out.push_back(static_cast<int>(i));
  }
  return out;
}

int Selection::count() const {
  return static_cast<int>(std::count_if(chosen.begin(), chosen.end(),
                                        [](std::uint8_t x) { return x != 0; }));
}

namespace {

Selection make_selection(std::size_t n, std::span<const int> indices) {
  Selection s;
  s.chosen.assign(n, 0);
  for (int i : indices) s.chosen[static_cast<std::size_t>(i)] = 1;
  s.target = static_cast<int>(indices.size());
  return s;
}

void check_m(std::size_t n, int m) {
  if (m < 1 || static_cast<std::size_t>(m) > n) {
    throw Error(fmt::format("selection size {} outside [1, {}]", m, n));
  }
}

}  // namespace

DistanceMatrix cosine_distance_matrix(const diff::Tensor<double>& vectors) {
  const auto n = static_cast<std::size_t>(vectors.rows());
  const auto h = static_cast<std::size_t>(vectors.cols());
  std::vector<double> norms(n);
  for (std::size_t i = 0; i < n; ++i) {
    double s = 0;
    for (auto v : vectors.row_span(static_cast<std::int64_t>(i))) s += v * v;
    norms[i] = std::sqrt(s);
    if (!(norms[i] > 0.0)) throw NumericError(fmt::format("row {} has zero norm", i));
  }
  std::vector<double> d(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    const auto vi = vectors.row_span(static_cast<std::int64_t>(i));
    for (std::size_t j = i + 1; j < n; ++j) {
      const auto vj = vectors.row_span(static_cast<std::int64_t>(j));
      double dot = 0;
      for (std::size_t k = 0; k < h; ++k) dot += vi[k] * vj[k];
      const double dist = std::clamp(1.0 - dot / (norms[i] * norms[j]), 0.0, 2.0);
      d[i * n + j] = dist;
      d[j * n + i] = dist;
    }
  }
  return DistanceMatrix(n, std::move(d));
}

double diversity_objective(const DistanceMatrix& d, std::span<const int> indices) {
  double total = 0;
  for (std::size_t a = 0; a < indices.size(); ++a) {
    for (std::size_t b = a + 1; b < indices.size(); ++b) {
      total += d(static_cast<std::size_t>(indices[a]), static_cast<std::size_t>(indices[b]));
    }
  }
  return total;
}

Selection select_greedy(const DistanceMatrix& d, int m) {
  const std::size_t n = d.size();
  check_m(n, m);
  std::vector<int> chosen;
  if (m == 1) {
    chosen.push_back(0);
    return make_selection(n, chosen);
  }
  std::size_t bi = 0, bj = 1;
  double best = -1.0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      if (d(i, j) > best) {
        best = d(i, j);
        bi = i;
        bj = j;
      }
    }
  }
  std::vector<std::uint8_t> in(n, 0);
  in[bi] = in[bj] = 1;
  std::vector<double> gain(n, 0.0);
  for (std::size_t j = 0; j < n; ++j) gain[j] = d(j, bi) + d(j, bj);
  for (int step = 2; step < m; ++step) {
    std::size_t pick = n;
    for (std::size_t j = 0; j < n; ++j) {
      if (in[j] == 0 && (pick == n || gain[j] > gain[pick])) pick = j;
    }
    in[pick] = 1;
    for (std::size_t j = 0; j < n; ++j) gain[j] += d(j, pick);
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (in[i] != 0) chosen.push_back(static_cast<int>(i));
  }
  return make_selection(n, chosen);
}

namespace {

// Depth-first search over index-ordered subsets (include before exclude, so
// leaves are met in lexicographic order). The bound for a node with chosen
// set S and k open slots: value(S) plus the k largest
//   c_j = sum_{i in S} d_ij + 1/2 * (top k-1 distances from j to other candidates).
class BranchAndBound {
 public:
  BranchAndBound(const DistanceMatrix& d, int m, double floor)
      : d_(d), n_(d.size()), m_(m), floor_(floor) {}

  std::vector<int> solve() {
    std::vector<int> chosen;
    search(0, chosen, 0.0);
    return best_set_;
  }

 private:
  double bound(std::size_t pos, const std::vector<int>& chosen, double value) const {
    const std::size_t k = static_cast<std::size_t>(m_) - chosen.size();
    std::vector<double> contrib;
    contrib.reserve(n_ - pos);
    std::vector<double> row;
    for (std::size_t j = pos; j < n_; ++j) {
      double c = 0;
      for (int i : chosen) c += d_(j, static_cast<std::size_t>(i));
      if (k > 1) {
        row.clear();
        for (std::size_t t = pos; t < n_; ++t) {
          if (t != j) row.push_back(d_(j, t));
        }
        const std::size_t take = std::min(k - 1, row.size());
        std::partial_sort(row.begin(), row.begin() + static_cast<std::ptrdiff_t>(take), row.end(),
                          std::greater<>());
        double s = 0;
        for (std::size_t t = 0; t < take; ++t) s += row[t];
        c += 0.5 * s;
      }
      contrib.push_back(c);
    }
    std::partial_sort(contrib.begin(), contrib.begin() + static_cast<std::ptrdiff_t>(k),
                      contrib.end(), std::greater<>());
    double ub = value;
    for (std::size_t t = 0; t < k; ++t) ub += contrib[t];
    return ub;
  }

  void search(std::size_t pos, std::vector<int>& chosen, double value) {
    const std::size_t k = static_cast<std::size_t>(m_) - chosen.size();
    if (k == 0) {
      const double exact = diversity_objective(d_, chosen);
      if (exact > best_value_) {
        best_value_ = exact;
        best_set_ = chosen;
      }
      return;
    }
    if (n_ - pos < k) return;
    const double incumbent = std::max(best_value_, floor_);
    const double tol = 1e-9 * (1.0 + std::abs(incumbent));
    if (incumbent > -std::numeric_limits<double>::infinity() &&
        bound(pos, chosen, value) < incumbent - tol) {
      return;
    }
    double added = 0;
    for (int i : chosen) added += d_(pos, static_cast<std::size_t>(i));
    chosen.push_back(static_cast<int>(pos));
    search(pos + 1, chosen, value + added);
    chosen.pop_back();
    search(pos + 1, chosen, value);
  }

  const DistanceMatrix& d_;
  std::size_t n_;
  int m_;
  double floor_;
  double best_value_ = -std::numeric_limits<double>::infinity();
  std::vector<int> best_set_;
};

}  // namespace

Selection select_exact(const DistanceMatrix& d, int m) {
  const std::size_t n = d.size();
  if (n > kExactLimit) {
    throw Error(fmt::format("exact selection supports N <= {} (got {}); use greedy selection",
                            kExactLimit, n));
  }
  check_m(n, m);
  // The greedy value is a valid lower bound on the optimum, so it only
  // tightens pruning; ties are still resolved by the search order.
  const double floor = diversity_objective(d, select_greedy(d, m).indices());
  const auto best = BranchAndBound(d, m, floor).solve();
  return make_selection(n, best);
}

Selection select_random(std::size_t n, int m, std::mt19937_64& rng) {
  check_m(n, m);
  std::vector<int> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  std::shuffle(idx.begin(), idx.end(), rng);
  idx.resize(static_cast<std::size_t>(m));
  std::sort(idx.begin(), idx.end());
  return make_selection(n, idx);
}

SelectionMode parse_selection_mode(const std::string& name) {
  if (name == "exact") return SelectionMode::kExact;
  if (name == "greedy") return SelectionMode::kGreedy;
  if (name == "random") return SelectionMode::kRandom;
  throw Error("unknown selection mode '" + name + "' (expected exact|greedy|random)");
}

std::string to_string(SelectionMode mode) {
  switch (mode) {
    case SelectionMode::kExact: return "exact";
    case SelectionMode::kGreedy: return "greedy";
    case SelectionMode::kRandom: return "random";
  }
  return "exact";
}

}  // namespace msam::synsel
