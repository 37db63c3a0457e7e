// Copyright 2026 The MSAM Authors.
// SPDX-License-Identifier: Apache-2.0

#include "msam/metrics/metrics.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "msam/error.hpp"

namespace msam::metrics {

void EvalBatch::validate() const {
  if (docs == 0 || classes == 0) throw Error("evaluation batch is empty");
  if (probs.size() != docs * classes || gold.size() != docs * classes) {
    throw DimensionError(fmt::format("evaluation batch of {}x{} has {} probabilities, {} labels",
                                     docs, classes, probs.size(), gold.size()));
  }
  for (double p : probs) {
    if (!(p >= 0.0 && p <= 1.0)) throw NumericError(fmt::format("probability {} outside [0, 1]", p));
  }
}

namespace {

struct Confusion {
  std::size_t tp = 0, fp = 0, fn = 0;
  double f1() const {
    const auto denom = 2 * tp + fp + fn;
    return denom == 0 ? 0.0 : 2.0 * static_cast<double>(tp) / static_cast<double>(denom);
  }
};

std::vector<Confusion> confusion_per_class(const EvalBatch& batch, double threshold) {
  batch.validate();
  std::vector<Confusion> out(batch.classes);
  for (std::size_t i = 0; i < batch.docs; ++i) {
    for (std::size_t l = 0; l < batch.classes; ++l) {
      const bool pred = batch.prob(i, l) >= threshold;
      const bool gold = batch.is_gold(i, l);
      if (pred && gold) ++out[l].tp;
      if (pred && !gold) ++out[l].fp;
      if (!pred && gold) ++out[l].fn;
    }
  }
  return out;
}

}  // namespace

std::vector<double> per_class_f1(const EvalBatch& batch, double threshold) {
  std::vector<double> out;
  for (const auto& c : confusion_per_class(batch, threshold)) out.push_back(c.f1());
  return out;
}

F1Scores f1_scores(const EvalBatch& batch, double threshold) {
  const auto per_class = confusion_per_class(batch, threshold);
  Confusion pooled;
  double macro = 0.0;
  for (const auto& c : per_class) {
    pooled.tp += c.tp;
    pooled.fp += c.fp;
    pooled.fn += c.fn;
    macro += c.f1();
  }
  return {macro / static_cast<double>(per_class.size()), pooled.f1()};
}

double precision_at_n(const EvalBatch& batch, int n) {
  batch.validate();
  if (n < 1) throw Error("precision@n needs n >= 1");
  if (static_cast<std::size_t>(n) > batch.classes) {
    throw Error(fmt::format("precision@{} exceeds the {} classes", n, batch.classes));
  }
  std::vector<std::size_t> order(batch.classes);
  double total = 0.0;
  for (std::size_t i = 0; i < batch.docs; ++i) {
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      return batch.prob(i, a) > batch.prob(i, b);
    });
    int hits = 0;
    for (int k = 0; k < n; ++k) hits += batch.is_gold(i, order[static_cast<std::size_t>(k)]) ? 1 : 0;
    total += static_cast<double>(hits) / n;
  }
  return total / static_cast<double>(batch.docs);
}

double binary_auc(std::span<const double> scores, std::span<const std::uint8_t> labels) {
  if (scores.size() != labels.size()) throw DimensionError("auc: scores vs labels length");
  const std::size_t n = scores.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });
  // Mid-ranks give ties half credit.
  double positive_rank_sum = 0.0;
  std::size_t positives = 0;
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j + 1 < n && scores[order[j + 1]] == scores[order[i]]) ++j;
    const double mid_rank = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t k = i; k <= j; ++k) {
      if (labels[order[k]] != 0) {
        positive_rank_sum += mid_rank;
        ++positives;
      }
    }
    i = j + 1;
  }
  const std::size_t negatives = n - positives;
  if (positives == 0 || negatives == 0) return std::numeric_limits<double>::quiet_NaN();
  const double p = static_cast<double>(positives);
  return (positive_rank_sum - p * (p + 1.0) / 2.0) / (p * static_cast<double>(negatives));
}

std::vector<double> per_class_auc(const EvalBatch& batch) {
  batch.validate();
  std::vector<double> out;
  std::vector<double> scores(batch.docs);
  std::vector<std::uint8_t> labels(batch.docs);
  for (std::size_t l = 0; l < batch.classes; ++l) {
    for (std::size_t i = 0; i < batch.docs; ++i) {
      scores[i] = batch.prob(i, l);
      labels[i] = batch.gold[i * batch.classes + l];
    }
    out.push_back(binary_auc(scores, labels));
  }
  return out;
}

AucScores auc_scores(const EvalBatch& batch) {
  const auto per_class = per_class_auc(batch);
  double sum = 0.0;
  std::size_t used = 0;
  for (double a : per_class) {
    if (std::isnan(a)) continue;
    sum += a;
    ++used;
  }
  if (used == 0) throw Error("auc: no class has both positive and negative examples");
  const double micro = binary_auc(batch.probs, batch.gold);
  return {sum / static_cast<double>(used), micro};
}

std::vector<CalibrationBin> calibration_table(const EvalBatch& batch, std::size_t cls, int bins) {
  batch.validate();
  if (bins < 1) throw Error("calibration needs at least one bin");
  if (cls >= batch.classes) throw DimensionError("calibration: class index out of range");
  std::vector<CalibrationBin> table(static_cast<std::size_t>(bins));
  std::vector<double> conf_sum(table.size(), 0.0), pos_sum(table.size(), 0.0);
  for (std::size_t i = 0; i < batch.docs; ++i) {
    const double p = batch.prob(i, cls);
    const auto b = std::min(static_cast<std::size_t>(p * bins), table.size() - 1);
    ++table[b].count;
    conf_sum[b] += p;
    pos_sum[b] += batch.is_gold(i, cls) ? 1.0 : 0.0;
  }
  for (std::size_t b = 0; b < table.size(); ++b) {
    if (table[b].count == 0) continue;
    const auto n = static_cast<double>(table[b].count);
    table[b].mean_confidence = conf_sum[b] / n;
    table[b].positive_fraction = pos_sum[b] / n;
  }
  return table;
}

MeceResult mece(const EvalBatch& batch, int bins) {
  batch.validate();
  MeceResult out;
  const auto n = static_cast<double>(batch.docs);
  for (std::size_t l = 0; l < batch.classes; ++l) {
    double ece = 0.0;
    for (const auto& bin : calibration_table(batch, l, bins)) {
      if (bin.count == 0) continue;
      ece += static_cast<double>(bin.count) / n * std::abs(bin.positive_fraction - bin.mean_confidence);
    }
    out.per_class.push_back(ece);
  }
  out.mean = std::accumulate(out.per_class.begin(), out.per_class.end(), 0.0) /
             static_cast<double>(out.per_class.size());
  return out;
}

FrequencyBands frequency_bands(std::span<const double> values, std::span<const double> frequency) {
  if (values.size() != frequency.size() || values.empty()) {
    throw DimensionError("frequency_bands: values and frequencies must align");
  }
  const std::size_t n = values.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return frequency[a] < frequency[b]; });
  auto band_mean = [&](double lo, double hi) {
    auto begin = static_cast<std::size_t>(std::floor(lo * static_cast<double>(n)));
    auto end = static_cast<std::size_t>(std::ceil(hi * static_cast<double>(n)));
    begin = std::min(begin, n - 1);
    end = std::clamp(end, begin + 1, n);
    double s = 0.0;
    for (std::size_t k = begin; k < end; ++k) s += values[order[k]];
    return s / static_cast<double>(end - begin);
  };
  return {band_mean(0.0, 0.1), band_mean(0.55, 0.65), band_mean(0.9, 1.0)};
}

QuantErrors quant_errors(std::span<const std::vector<double>> estimates,
                         std::span<const std::vector<double>> truths,
                         std::span<const int> group_sizes) {
  if (estimates.size() != truths.size() || estimates.size() != group_sizes.size()) {
    throw DimensionError("quant_errors: estimates, truths and sizes must align");
  }
  if (estimates.empty()) throw Error("quant_errors: no groups");
  QuantErrors out;
  for (std::size_t g = 0; g < estimates.size(); ++g) {
    if (group_sizes[g] <= 0) throw Error("quant_errors: group size must be positive");
    if (estimates[g].size() != truths[g].size() || estimates[g].empty()) {
      throw DimensionError("quant_errors: estimate and truth lengths differ");
    }
    const double eps = 1.0 / (2.0 * group_sizes[g]);
    double abs_sum = 0.0, rel_sum = 0.0;
    for (std::size_t l = 0; l < truths[g].size(); ++l) {
      const double err = std::abs(estimates[g][l] - truths[g][l]);
      abs_sum += err;
      rel_sum += err / (truths[g][l] + eps);
    }
    const auto L = static_cast<double>(truths[g].size());
    out.mae += abs_sum / L;
    out.mrae += rel_sum / L;
  }
  out.mae /= static_cast<double>(estimates.size());
  out.mrae /= static_cast<double>(estimates.size());
  return out;
}

}  // namespace msam::metrics
