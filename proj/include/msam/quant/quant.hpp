// Copyright 2026 The MSAM Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "msam/diff/params.hpp"
#include "msam/text/document.hpp"

namespace msam::quant {

using diff::ParamBinding;
using diff::ParameterSet;
using diff::Var;

// Rows are per-document probability vectors of equal length.
using ProbabilityRows = std::span<const std::vector<double>>;

// Fraction of rows with probability >= threshold, per class.
std::vector<double> cc_estimate(ProbabilityRows probs, double threshold = 0.5);
// Column mean of the rows.
std::vector<double> pcc_estimate(ProbabilityRows probs);

struct RefinerConfig {
  int codes = 0;   // L
  int hidden = 8;  // h, must stay below L
  void validate() const;
};

// L -> h (ReLU) -> L (sigmoid) correction of PCC vectors.
template <typename T>
class Refiner {
 public:
  static Refiner create(const RefinerConfig& config, std::mt19937_64& rng);
  static Refiner attach(const RefinerConfig& config, ParameterSet<T> params);

  // 1 x L refined prevalence for a 1 x L input recorded on bind.graph().
  Var forward(ParamBinding<T>& bind, Var pcc) const;
  std::vector<double> refine(std::span<const double> pcc) const;

  const RefinerConfig& config() const { return config_; }
  ParameterSet<T>& params() { return params_; }
  const ParameterSet<T>& params() const { return params_; }

 private:
  Refiner(const RefinerConfig& config, ParameterSet<T> params);

  RefinerConfig config_;
  ParameterSet<T> params_;
  std::size_t w1_ = 0, b1_ = 0, w2_ = 0, b2_ = 0;
};

extern template class Refiner<float>;
extern template class Refiner<double>;

struct QuantGroup {
  std::vector<std::size_t> members;  // indices into the sampled document set
  std::vector<double> prevalence;
  int size() const { return static_cast<int>(members.size()); }
};

// Fraction of `members` carrying each code.
std::vector<double> group_prevalence(std::span<const text::Document> docs,
                                     std::span<const std::size_t> members, int num_codes);

// Each group draws its size uniformly in [1, |docs|] and its members without
// replacement.
std::vector<QuantGroup> sample_groups(std::span<const text::Document> docs, int num_codes,
                                      int count, std::uint64_t seed);

// JSON Lines {"ids": [...], "size": n}.
void write_groups(const std::filesystem::path& path, std::span<const QuantGroup> groups,
                  std::span<const text::Document> docs);
// Resolves the stored ids against `docs`; unknown ids are an error.
std::vector<QuantGroup> read_groups(const std::filesystem::path& path,
                                    std::span<const text::Document> docs, int num_codes);

struct RefinerTrainConfig {
  double lr0 = 2e-5;
  int max_epochs = 300;
  int patience = 5;
  int batch_size = 16;
  double holdout_fraction = 0.2;
  std::uint64_t seed = 13;
};

struct RefinerTrainResult {
  std::vector<double> train_loss;    // mean per-example squared error per epoch
  std::vector<double> holdout_loss;  // same on the holdout split
  int epochs = 0;
  double best_holdout = 0.0;
};

// Fits the refiner to map PCC vectors onto true prevalences with a summed
// squared-error loss, early stopping on the holdout loss and restoring the
// best parameters. With zero epochs the refiner is left untouched.
RefinerTrainResult train_refiner_standalone(Refiner<float>& refiner,
                                            std::span<const std::vector<double>> pcc_inputs,
                                            std::span<const std::vector<double>> targets,
                                            const RefinerTrainConfig& config);

struct EstimateRow {
  std::size_t group = 0;
  std::string method;
  int cls = 0;
  double estimate = 0.0;
  double truth = 0.0;
};

// CSV with header group_id,method,class,estimate,truth.
void write_estimates(const std::filesystem::path& path, std::span<const EstimateRow> rows);

}  // namespace msam::quant
