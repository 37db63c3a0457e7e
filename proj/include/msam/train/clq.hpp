// Copyright 2026 The MSAM Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include "msam/diff/optim.hpp"
#include "msam/quant/quant.hpp"
#include "msam/train/losses.hpp"
#include "msam/train/trainer.hpp"

namespace msam::train {

// Running probability and gold-count sums of the current group.
class GroupAccumulator {
 public:
  explicit GroupAccumulator(int codes);

  // Empties the group and sets the number of instances it will hold.
  void reset(int limit);
  void add(std::span<const double> probs, std::span<const int> gold_codes);

  std::vector<double> pcc() const;         // sum / count
  std::vector<double> prevalence() const;  // gold counts / count
  const std::vector<double>& probability_sum() const { return prob_sum_; }
  int count() const { return count_; }
  int limit() const { return limit_; }
  bool full() const { return count_ >= limit_; }

 private:
  std::vector<double> prob_sum_;
  std::vector<double> gold_sum_;
  int count_ = 0;
  int limit_ = 1;
};

struct ClqConfig {
  LossConfig loss;
  int batch_size = 16;
  double lr0 = 2e-5;
  double refiner_lr0 = 2e-5;
  int max_epochs = 300;
  int patience = 5;
  StopCriterion criterion = StopCriterion::kMicroF1;
  void validate() const;
};

// Optimiser and schedule state carried across epochs.
struct ClqState {
  ClqState(const Classifier<float>& model, const quant::Refiner<float>& refiner,
           const ClqConfig& config, std::size_t train_size, std::uint64_t seed);

  ClqConfig config;
  diff::Adam<float> model_opt;
  diff::Adam<float> refiner_opt;
  std::int64_t step = 0;
  std::int64_t total_steps = 1;
  std::size_t train_size = 0;
  std::mt19937_64 rng;
};

// Snapshot taken whenever a group closes (and for the partial group left at
// the end of an epoch).
struct GroupBoundary {
  std::vector<double> streamed_pcc;
  std::vector<std::vector<double>> member_probs;
  int limit = 0;
  bool complete = false;
};

struct ClqTrace {
  std::vector<GroupBoundary> boundaries;
  // Accumulator (count, limit) after every instance.
  std::vector<std::pair<int, int>> occupancy;
  // Limits drawn at each reset.
  std::vector<int> drawn_limits;
};

struct ClqEpochStats {
  double classification_loss = 0.0;  // mean per instance
  double quant_loss = 0.0;           // mean per instance, before lambda
  int instances = 0;
  int groups_closed = 0;
  int updates = 0;
};

// One pass over `data` in the given order. Each instance contributes
// BCE + lambda * quant_loss(refiner(PCC so far), prevalence so far), with
// gradient flowing only through the current instance's probabilities. Both
// networks step every batch_size instances.
ClqEpochStats clq_epoch(Classifier<float>& model, quant::Refiner<float>& refiner,
                        std::span<const Document> data, GroupAccumulator& acc, ClqState& state,
                        ClqTrace* trace = nullptr);

struct ClqResult {
  std::vector<EpochRecord> history;
  double best_value = 0.0;
  int best_epoch = 0;
  int epochs_run = 0;
};

// Repeats shuffled clq_epochs with early stopping on `config.criterion`
// (quantMSE scores the refined PCC of `valid_groups`) and restores the best
// model and refiner.
ClqResult train_clq(Classifier<float>& model, quant::Refiner<float>& refiner,
                    std::span<const Document> train, std::span<const Document> valid,
                    std::span<const quant::QuantGroup> valid_groups, const ClqConfig& config,
                    std::uint64_t seed, const EpochObserver& observer = {});

}  // namespace msam::train
