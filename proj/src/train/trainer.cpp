// Copyright 2026 The MSAM Authors.
// SPDX-License-Identifier: Apache-2.0

#include "msam/train/trainer.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <numeric>

#include "msam/diff/optim.hpp"
#include "msam/error.hpp"

namespace msam::train {

StopCriterion parse_stop_criterion(const std::string& name) {
  if (name == "microF1") return StopCriterion::kMicroF1;
  if (name == "MECE") return StopCriterion::kMece;
  if (name == "quantMSE") return StopCriterion::kQuantMse;
  throw Error(fmt::format("unknown stop criterion '{}' (microF1, MECE or quantMSE)", name));
}

std::string to_string(StopCriterion criterion) {
  switch (criterion) {
    case StopCriterion::kMicroF1: return "microF1";
    case StopCriterion::kMece: return "MECE";
    case StopCriterion::kQuantMse: return "quantMSE";
  }
  return "unknown";
}

StopState::StopState(StopCriterion criterion, int patience)
    : criterion_(criterion), patience_(patience) {
  if (patience < 1) throw Error(fmt::format("patience must be >= 1, got {}", patience));
}

bool StopState::observe(double value) {
  const bool better = !has_best_ || (higher_is_better() ? value > best_ : value < best_);
  if (better) {
    best_ = value;
    has_best_ = true;
    stale_ = 0;
  } else {
    ++stale_;
  }
  return better;
}

metrics::EvalBatch evaluate(const Classifier<float>& model, std::span<const Document> docs) {
  if (docs.empty()) throw Error("evaluate: no documents");
  metrics::EvalBatch batch;
  batch.docs = docs.size();
  batch.classes = static_cast<std::size_t>(model.num_codes());
  batch.probs.reserve(batch.docs * batch.classes);
  batch.gold.reserve(batch.docs * batch.classes);
  for (const auto& doc : docs) {
    for (float p : model.predict(doc)) batch.probs.push_back(static_cast<double>(p));
    for (float y : doc.label_vector(model.num_codes())) batch.gold.push_back(y != 0.0f ? 1 : 0);
  }
  return batch;
}

void StageConfig::validate() const {
  if (!(lr0 > 0.0)) throw Error(fmt::format("{}: learning rate must be positive", name));
  if (max_epochs < 0) throw Error(fmt::format("{}: max_epochs must be >= 0", name));
  if (batch_size < 1) throw Error(fmt::format("{}: batch_size must be >= 1", name));
  if (criterion == StopCriterion::kQuantMse) {
    throw Error(fmt::format("{}: classifier stages stop on microF1 or MECE", name));
  }
}

namespace {

void score(EpochRecord& rec, const metrics::EvalBatch& batch, StopCriterion criterion) {
  const auto f1 = metrics::f1_scores(batch);
  rec.micro_f1 = f1.micro;
  rec.macro_f1 = f1.macro;
  rec.mece = metrics::mece(batch).mean;
  rec.criterion_value = criterion == StopCriterion::kMicroF1 ? rec.micro_f1 : rec.mece;
}

}  // namespace

StageResult train_stage(Classifier<float>& model, std::span<const Document> train,
                        std::span<const Document> valid, const StageConfig& config,
                        std::mt19937_64& rng, const EpochObserver& observer) {
  config.validate();
  if (train.empty() || valid.empty()) throw Error("training needs non-empty train and validation splits");

  StageResult result;
  StopState stop(config.criterion, config.patience);
  auto& params = model.params();

  EpochRecord initial;
  initial.stage = config.name;
  score(initial, evaluate(model, valid), config.criterion);
  initial.improved = stop.observe(initial.criterion_value);
  result.history.push_back(initial);
  if (observer) observer(initial);
  auto best_params = params.values();

  const auto batch = static_cast<std::size_t>(config.batch_size);
  const auto batches = static_cast<std::int64_t>((train.size() + batch - 1) / batch);
  const std::int64_t total_steps = std::max<std::int64_t>(1, batches * config.max_epochs);
  std::int64_t step = 0;
  diff::Adam<float> adam(params);
  std::vector<std::size_t> order(train.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  const int L = model.num_codes();

  for (int epoch = 1; epoch <= config.max_epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    double loss_sum = 0.0;
    double lr = 0.0;
    for (std::size_t start = 0; start < order.size(); start += batch) {
      const std::size_t end = std::min(order.size(), start + batch);
      auto grads = params.zeros_like();
      for (std::size_t k = start; k < end; ++k) {
        const auto& doc = train[order[k]];
        diff::Graph<float> g;
        diff::ParamBinding<float> bind(g, params);
        const auto y = doc.label_vector(L);
        const diff::Var loss = g.bce_with_logits(model.forward(bind, doc), y);
        loss_sum += g.value(loss).data()[0];
        g.backward(loss);
        bind.accumulate(grads);
      }
      const float inv = 1.0f / static_cast<float>(end - start);
      for (auto& t : grads) {
        for (auto& v : t.data()) v *= inv;
      }
      lr = diff::linear_lr(step++, total_steps, config.lr0);
      adam.step(params, grads, lr);
    }

    EpochRecord rec;
    rec.stage = config.name;
    rec.epoch = epoch;
    rec.lr = lr;
    rec.train_loss = loss_sum / static_cast<double>(train.size());
    score(rec, evaluate(model, valid), config.criterion);
    rec.improved = stop.observe(rec.criterion_value);
    if (rec.improved) {
      best_params = params.values();
      result.best_epoch = epoch;
    }
    result.history.push_back(rec);
    result.epochs_run = epoch;
    if (observer) observer(rec);
    if (stop.exhausted()) {
      result.stopped_early = true;
      break;
    }
  }
  params.values() = std::move(best_params);
  result.best_value = stop.best();
  return result;
}

std::vector<EpochRecord> TwoStageResult::history() const {
  auto all = stage1.history;
  all.insert(all.end(), stage2.history.begin(), stage2.history.end());
  return all;
}

TwoStageResult train_classifier_two_stage(Classifier<float>& model,
                                          std::span<const Document> train,
                                          std::span<const Document> valid,
                                          const TwoStageConfig& config, std::mt19937_64& rng,
                                          const EpochObserver& observer) {
  TwoStageResult result;
  result.stage1 = train_stage(model, train, valid, config.stage1, rng, observer);
  if (config.run_stage2) {
    result.stage2 = train_stage(model, train, valid, config.stage2, rng, observer);
  }
  return result;
}

}  // namespace msam::train
