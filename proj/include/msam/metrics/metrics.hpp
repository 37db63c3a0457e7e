// Copyright 2026 The MSAM Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace msam::metrics {

// n documents x L classes of probabilities and binary gold labels, row-major.
struct EvalBatch {
  std::size_t docs = 0;
  std::size_t classes = 0;
  std::vector<double> probs;
  std::vector<std::uint8_t> gold;

  double prob(std::size_t i, std::size_t l) const { return probs[i * classes + l]; }
  bool is_gold(std::size_t i, std::size_t l) const { return gold[i * classes + l] != 0; }

  // Throws on empty batches, size mismatches and probabilities outside [0, 1].
  void validate() const;
};

struct F1Scores {
  double macro = 0.0;
  double micro = 0.0;
};

// A prediction is positive when prob >= threshold. Classes with no gold
// positives and no predictions score F1 = 0 in the macro average.
F1Scores f1_scores(const EvalBatch& batch, double threshold = 0.5);
std::vector<double> per_class_f1(const EvalBatch& batch, double threshold = 0.5);

// Mean over documents of |top-n classes ∩ gold| / n; ties by lower index.
double precision_at_n(const EvalBatch& batch, int n);

struct AucScores {
  double macro = 0.0;
  double micro = 0.0;
};

// Probability that a random positive outscores a random negative, ties
// counting one half. NaN when either label is absent.
double binary_auc(std::span<const double> scores, std::span<const std::uint8_t> labels);

// Macro averages the classes that have both labels; micro pools all pairs.
AucScores auc_scores(const EvalBatch& batch);
std::vector<double> per_class_auc(const EvalBatch& batch);

struct CalibrationBin {
  std::size_t count = 0;
  double mean_confidence = 0.0;
  double positive_fraction = 0.0;
};

// Equal-width bins over [0, 1] for one class; p = 1 falls in the last bin.
std::vector<CalibrationBin> calibration_table(const EvalBatch& batch, std::size_t cls,
                                              int bins = 20);

struct MeceResult {
  double mean = 0.0;
  std::vector<double> per_class;
};

// Per-class expected calibration error sum_b (n_b / n) |pos_b - conf_b|,
// averaged over classes.
MeceResult mece(const EvalBatch& batch, int bins = 20);

// Mean of `values` over the lowest 10 %, the 55-65 % band and the highest
// 10 % of classes ranked by `frequency`.
struct FrequencyBands {
  double low = 0.0;
  double medium = 0.0;
  double high = 0.0;
};
FrequencyBands frequency_bands(std::span<const double> values, std::span<const double> frequency);

struct QuantErrors {
  double mae = 0.0;
  double mrae = 0.0;
};

// Per group: MAE = mean_l |est - truth|, MRAE = mean_l |est - truth| / (truth + eps)
// with eps = 1 / (2 * size). Both are averaged over groups.
QuantErrors quant_errors(std::span<const std::vector<double>> estimates,
                         std::span<const std::vector<double>> truths,
                         std::span<const int> group_sizes);

}  // namespace msam::metrics
