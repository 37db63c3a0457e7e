// Copyright 2026 The MSAM Authors.
// SPDX-License-Identifier: Apache-2.0

// Brute-force reference implementations shared by the unit tests and the
// acceptance binary. They favour directness over speed.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <utility>
#include <vector>

namespace msam::oracle {

struct Window {
  std::int64_t begin = 0;
  std::int64_t end = 0;
};

// Slides a window of `capacity` content tokens by capacity - overlap until
// the last token is covered.
inline std::vector<Window> chunk_windows(std::int64_t n, std::int64_t chunk_len,
                                         std::int64_t overlap) {
  const std::int64_t capacity = chunk_len - 1;
  std::vector<Window> out;
  std::int64_t start = 0;
  while (true) {
    const std::int64_t end = std::min(start + capacity, n);
    out.push_back({start, end});
    if (end == n) break;
    start += capacity - overlap;
  }
  return out;
}

// Objective of a selection under cosine distances d (row-major n x n).
inline double selection_objective(const std::vector<double>& d, int n,
                                  const std::vector<int>& pick) {
  double total = 0.0;
  for (std::size_t a = 0; a < pick.size(); ++a) {
    for (std::size_t b = a + 1; b < pick.size(); ++b) {
      total += d[static_cast<std::size_t>(pick[a] * n + pick[b])];
    }
  }
  return total;
}

struct BestSubset {
  std::vector<int> indices;
  double value = -std::numeric_limits<double>::infinity();
};

// Exhaustive search over all size-m subsets in lexicographic order; the
// first maximum wins.
inline BestSubset best_selection(const std::vector<double>& d, int n, int m) {
  BestSubset best;
  std::vector<int> pick;
  auto rec = [&](auto&& self, int next) -> void {
    if (static_cast<int>(pick.size()) == m) {
      const double v = selection_objective(d, n, pick);
      if (v > best.value) best = {pick, v};
      return;
    }
    for (int i = next; i < n; ++i) {
      pick.push_back(i);
      self(self, i + 1);
      pick.pop_back();
    }
  };
  rec(rec, 0);
  return best;
}

// AUC as the fraction of (positive, negative) pairs ranked correctly, ties
// counting one half. NaN without both labels.
inline double pair_auc(const std::vector<double>& scores, const std::vector<int>& labels) {
  double good = 0.0;
  double pairs = 0.0;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    if (labels[i] != 1) continue;
    for (std::size_t j = 0; j < scores.size(); ++j) {
      if (labels[j] != 0) continue;
      pairs += 1.0;
      if (scores[i] > scores[j]) good += 1.0;
      else if (scores[i] == scores[j]) good += 0.5;
    }
  }
  return pairs == 0.0 ? std::nan("") : good / pairs;
}

// Dense n x L matrices as row-major vectors.
struct Labelled {
  int n = 0;
  int L = 0;
  std::vector<double> p;
  std::vector<int> y;
};

inline double f1_from_counts(double tp, double fp, double fn) {
  const double den = 2 * tp + fp + fn;
  return den == 0 ? 0.0 : 2 * tp / den;
}

// Micro and macro F1 from explicit confusion counts.
inline std::pair<double, double> micro_macro_f1(const Labelled& b, double thr = 0.5) {
  double TP = 0, FP = 0, FN = 0, macro = 0;
  for (int l = 0; l < b.L; ++l) {
    double tp = 0, fp = 0, fn = 0;
    for (int i = 0; i < b.n; ++i) {
      const bool pred = b.p[i * b.L + l] >= thr;
      const bool gold = b.y[i * b.L + l] == 1;
      tp += pred && gold;
      fp += pred && !gold;
      fn += !pred && gold;
    }
    TP += tp;
    FP += fp;
    FN += fn;
    macro += f1_from_counts(tp, fp, fn);
  }
  return {f1_from_counts(TP, FP, FN), macro / b.L};
}

// Precision@N by repeatedly extracting the highest remaining score (lowest
// index on ties).
inline double precision_at(const Labelled& b, int N) {
  double total = 0;
  for (int i = 0; i < b.n; ++i) {
    std::vector<bool> used(static_cast<std::size_t>(b.L), false);
    int hits = 0;
    for (int k = 0; k < N; ++k) {
      int best = -1;
      for (int l = 0; l < b.L; ++l) {
        if (!used[l] && (best < 0 || b.p[i * b.L + l] > b.p[i * b.L + best])) best = l;
      }
      used[best] = true;
      hits += b.y[i * b.L + best];
    }
    total += static_cast<double>(hits) / N;
  }
  return total / b.n;
}

// Expected calibration error of one class over equal-width bins.
inline double ece(const Labelled& b, int l, int bins) {
  double total = 0;
  for (int k = 0; k < bins; ++k) {
    double count = 0, conf = 0, pos = 0;
    for (int i = 0; i < b.n; ++i) {
      const double p = b.p[i * b.L + l];
      const int bin = std::min(bins - 1, static_cast<int>(std::floor(p * bins)));
      if (bin != k) continue;
      count += 1;
      conf += p;
      pos += b.y[i * b.L + l];
    }
    if (count > 0) total += count / b.n * std::abs(pos / count - conf / count);
  }
  return total;
}

struct QuantErr {
  double mae = 0;
  double mrae = 0;
};

inline QuantErr quant_errors(const std::vector<std::vector<double>>& est,
                             const std::vector<std::vector<double>>& truth,
                             const std::vector<int>& sizes) {
  QuantErr out;
  for (std::size_t g = 0; g < est.size(); ++g) {
    const double eps = 1.0 / (2.0 * sizes[g]);
    double a = 0, r = 0;
    for (std::size_t l = 0; l < est[g].size(); ++l) {
      const double d = std::abs(est[g][l] - truth[g][l]);
      a += d;
      r += d / (truth[g][l] + eps);
    }
    out.mae += a / est[g].size();
    out.mrae += r / est[g].size();
  }
  out.mae /= est.size();
  out.mrae /= est.size();
  return out;
}

}  // namespace msam::oracle
