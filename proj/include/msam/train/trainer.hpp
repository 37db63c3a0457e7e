// Copyright 2026 The MSAM Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <functional>
#include <limits>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "msam/metrics/metrics.hpp"
#include "msam/model/classifier.hpp"

namespace msam::train {

using diff::Var;
using model::Classifier;
using text::Document;

enum class StopCriterion { kMicroF1, kMece, kQuantMse };

StopCriterion parse_stop_criterion(const std::string& name);  // microF1 | MECE | quantMSE
std::string to_string(StopCriterion criterion);

// Early-stopping bookkeeping. The first observed value always becomes the
// best; later values must strictly improve on it.
class StopState {
 public:
  explicit StopState(StopCriterion criterion, int patience = 5);

  // Returns true when `value` is a new best.
  bool observe(double value);
  bool exhausted() const { return stale_ >= patience_; }

  StopCriterion criterion() const { return criterion_; }
  bool higher_is_better() const { return criterion_ == StopCriterion::kMicroF1; }
  bool has_best() const { return has_best_; }
  double best() const { return best_; }
  int stale_epochs() const { return stale_; }
  int patience() const { return patience_; }

 private:
  StopCriterion criterion_;
  int patience_;
  double best_ = 0.0;
  bool has_best_ = false;
  int stale_ = 0;
};

// Sigmoid outputs of `model` on every document.
metrics::EvalBatch evaluate(const Classifier<float>& model, std::span<const Document> docs);

struct StageConfig {
  std::string name = "stage1";
  double lr0 = 2e-5;
  int max_epochs = 300;
  int patience = 5;
  int batch_size = 16;
  StopCriterion criterion = StopCriterion::kMicroF1;
  void validate() const;
};

// Epoch 0 is the evaluation of the starting parameters.
struct EpochRecord {
  std::string stage;
  int epoch = 0;
  double lr = 0.0;
  double train_loss = std::numeric_limits<double>::quiet_NaN();
  double quant_loss = std::numeric_limits<double>::quiet_NaN();
  double micro_f1 = 0.0;
  double macro_f1 = 0.0;
  double mece = 0.0;
  double criterion_value = 0.0;
  bool improved = false;
};

struct StageResult {
  std::vector<EpochRecord> history;
  double best_value = 0.0;
  int best_epoch = 0;
  int epochs_run = 0;
  bool stopped_early = false;
};

using EpochObserver = std::function<void(const EpochRecord&)>;

// Mini-batch Adam on summed BCE with gradients averaged over each batch and
// a linear decay over max_epochs * batches steps. Validation is scored after
// every epoch and the best parameters (including the starting ones) are
// restored when the stage ends.
StageResult train_stage(Classifier<float>& model, std::span<const Document> train,
                        std::span<const Document> valid, const StageConfig& config,
                        std::mt19937_64& rng, const EpochObserver& observer = {});

struct TwoStageConfig {
  StageConfig stage1{"stage1", 2e-5, 300, 5, 16, StopCriterion::kMicroF1};
  StageConfig stage2{"stage2", 2e-7, 300, 5, 16, StopCriterion::kMece};
  bool run_stage2 = true;
};

struct TwoStageResult {
  StageResult stage1;
  StageResult stage2;
  std::vector<EpochRecord> history() const;
};

TwoStageResult train_classifier_two_stage(Classifier<float>& model,
                                          std::span<const Document> train,
                                          std::span<const Document> valid,
                                          const TwoStageConfig& config, std::mt19937_64& rng,
                                          const EpochObserver& observer = {});

}  // namespace msam::train
