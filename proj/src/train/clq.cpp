// Copyright 2026 The MSAM Authors.
// SPDX-License-Identifier: Apache-2.0

#include "msam/train/clq.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <numeric>

#include "msam/error.hpp"

namespace msam::train {

GroupAccumulator::GroupAccumulator(int codes)
    : prob_sum_(static_cast<std::size_t>(codes), 0.0),
      gold_sum_(static_cast<std::size_t>(codes), 0.0) {
  if (codes < 1) throw Error("group accumulator needs at least one code");
}

void GroupAccumulator::reset(int limit) {
  if (limit < 1) throw Error(fmt::format("group limit must be >= 1, got {}", limit));
  std::fill(prob_sum_.begin(), prob_sum_.end(), 0.0);
  std::fill(gold_sum_.begin(), gold_sum_.end(), 0.0);
  count_ = 0;
  limit_ = limit;
}

void GroupAccumulator::add(std::span<const double> probs, std::span<const int> gold_codes) {
  if (probs.size() != prob_sum_.size()) {
    throw DimensionError(fmt::format("accumulator expects {} probabilities, got {}",
                                     prob_sum_.size(), probs.size()));
  }
  if (full()) throw Error("accumulator is full; reset before adding");
  for (std::size_t l = 0; l < probs.size(); ++l) prob_sum_[l] += probs[l];
  for (int c : gold_codes) {
    if (c < 0 || static_cast<std::size_t>(c) >= gold_sum_.size()) {
      throw DimensionError(fmt::format("gold code {} out of range", c));
    }
    gold_sum_[static_cast<std::size_t>(c)] += 1.0;
  }
  ++count_;
}

namespace {

std::vector<double> divided(const std::vector<double>& v, int count) {
  if (count == 0) throw Error("empty group has no prevalence");
  std::vector<double> out(v);
  for (double& x : out) x /= count;
  return out;
}

}  // namespace

std::vector<double> GroupAccumulator::pcc() const { return divided(prob_sum_, count_); }
std::vector<double> GroupAccumulator::prevalence() const { return divided(gold_sum_, count_); }

void ClqConfig::validate() const {
  loss.validate();
  if (batch_size < 1) throw Error("clq: batch_size must be >= 1");
  if (!(lr0 > 0.0) || !(refiner_lr0 > 0.0)) throw Error("clq: learning rates must be positive");
  if (max_epochs < 0) throw Error("clq: max_epochs must be >= 0");
}

ClqState::ClqState(const Classifier<float>& model, const quant::Refiner<float>& refiner,
                   const ClqConfig& cfg, std::size_t n_train, std::uint64_t seed)
    : config(cfg),
      model_opt(model.params()),
      refiner_opt(refiner.params()),
      train_size(n_train),
      rng(seed) {
  config.validate();
  if (n_train == 0) throw Error("clq: empty training set");
  const auto batch = static_cast<std::size_t>(config.batch_size);
  total_steps = std::max<std::int64_t>(
      1, static_cast<std::int64_t>((n_train + batch - 1) / batch) * config.max_epochs);
}

namespace {

int draw_limit(ClqState& state) {
  std::uniform_int_distribution<int> dist(1, static_cast<int>(state.train_size));
  return dist(state.rng);
}

void scale_grads(std::vector<diff::Tensor<float>>& grads, float factor) {
  for (auto& t : grads) {
    for (auto& v : t.data()) v *= factor;
  }
}

}  // namespace

ClqEpochStats clq_epoch(Classifier<float>& model, quant::Refiner<float>& refiner,
                        std::span<const Document> data, GroupAccumulator& acc, ClqState& state,
                        ClqTrace* trace) {
  if (data.empty()) throw Error("clq_epoch: no training data");
  const int L = model.num_codes();
  if (refiner.config().codes != L) {
    throw DimensionError(fmt::format("refiner has {} codes but the model has {}",
                                     refiner.config().codes, L));
  }
  const auto& loss_cfg = state.config.loss;
  const float lambda = static_cast<float>(loss_cfg.lambda);

  auto reset = [&] {
    const int limit = draw_limit(state);
    acc.reset(limit);
    if (trace != nullptr) trace->drawn_limits.push_back(limit);
  };
  reset();

  ClqEpochStats stats;
  auto model_grads = model.params().zeros_like();
  auto refiner_grads = refiner.params().zeros_like();
  int pending = 0;
  std::vector<std::vector<double>> members;

  auto apply_update = [&] {
    const float inv = 1.0f / static_cast<float>(pending);
    scale_grads(model_grads, inv);
    scale_grads(refiner_grads, inv);
    const double frac = diff::linear_lr(std::min(state.step, state.total_steps - 1),
                                        state.total_steps, 1.0);
    state.model_opt.step(model.params(), model_grads, state.config.lr0 * frac);
    state.refiner_opt.step(refiner.params(), refiner_grads, state.config.refiner_lr0 * frac);
    ++state.step;
    ++stats.updates;
    model_grads = model.params().zeros_like();
    refiner_grads = refiner.params().zeros_like();
    pending = 0;
  };

  auto snapshot = [&](bool complete) {
    if (trace == nullptr || acc.count() == 0) return;
    trace->boundaries.push_back({acc.pcc(), members, acc.limit(), complete});
  };

  std::vector<float> target(static_cast<std::size_t>(L));
  std::vector<double> probs(static_cast<std::size_t>(L));
  for (const auto& doc : data) {
    diff::Graph<float> g;
    diff::ParamBinding<float> mbind(g, model.params());
    diff::ParamBinding<float> rbind(g, refiner.params());

    const Var logits = model.forward(mbind, doc);
    const Var lc = g.bce_with_logits(logits, doc.label_vector(L));
    const Var p = g.sigmoid(logits);
    const auto& pv = g.value(p);
    std::transform(pv.data().begin(), pv.data().end(), probs.begin(),
                   [](float v) { return static_cast<double>(v); });

    // Earlier members enter as a constant offset.
    auto prev = diff::Tensor<float>::matrix(1, L);
    for (int l = 0; l < L; ++l) {
      prev.data()[static_cast<std::size_t>(l)] =
          static_cast<float>(acc.probability_sum()[static_cast<std::size_t>(l)]);
    }
    acc.add(probs, doc.gold_codes);
    if (trace != nullptr) {
      members.push_back(probs);
      trace->occupancy.emplace_back(acc.count(), acc.limit());
    }
    const Var pcc = g.scale(g.add(p, g.constant(std::move(prev))),
                            1.0f / static_cast<float>(acc.count()));
    const auto prevalence = acc.prevalence();
    std::transform(prevalence.begin(), prevalence.end(), target.begin(),
                   [](double v) { return static_cast<float>(v); });
    const Var refined = refiner.forward(rbind, pcc);
    const Var lq = loss_cfg.kind == QuantLossKind::kMse
                       ? g.squared_error(refined, target)
                       : g.huber(refined, target, static_cast<float>(loss_cfg.delta));
    const Var total = g.add(lc, g.scale(lq, lambda));
    g.backward(total);
    mbind.accumulate(model_grads);
    rbind.accumulate(refiner_grads);

    stats.classification_loss += g.value(lc).data()[0];
    stats.quant_loss += g.value(lq).data()[0];
    ++stats.instances;
    if (++pending == state.config.batch_size) apply_update();

    if (acc.full()) {
      snapshot(true);
      ++stats.groups_closed;
      members.clear();
      reset();
    }
  }
  if (pending > 0) apply_update();
  snapshot(false);
  stats.classification_loss /= stats.instances;
  stats.quant_loss /= stats.instances;
  return stats;
}

namespace {

double refined_group_mse(const Classifier<float>& model, const quant::Refiner<float>& refiner,
                         std::span<const Document> valid,
                         std::span<const quant::QuantGroup> groups) {
  if (groups.empty()) throw Error("quantMSE stopping needs validation groups");
  std::vector<std::vector<double>> probs;
  probs.reserve(valid.size());
  for (const auto& doc : valid) {
    const auto p = model.predict(doc);
    probs.emplace_back(p.begin(), p.end());
  }
  double total = 0.0;
  std::vector<std::vector<double>> rows;
  for (const auto& group : groups) {
    rows.clear();
    for (auto m : group.members) rows.push_back(probs.at(m));
    total += quant_loss_mse(refiner.refine(quant::pcc_estimate(rows)), group.prevalence);
  }
  return total / static_cast<double>(groups.size());
}

}  // namespace

ClqResult train_clq(Classifier<float>& model, quant::Refiner<float>& refiner,
                    std::span<const Document> train, std::span<const Document> valid,
                    std::span<const quant::QuantGroup> valid_groups, const ClqConfig& config,
                    std::uint64_t seed, const EpochObserver& observer) {
  if (train.empty() || valid.empty()) throw Error("clq training needs train and validation data");
  ClqState state(model, refiner, config, train.size(), seed);
  StopState stop(config.criterion, config.patience);
  GroupAccumulator acc(model.num_codes());
  ClqResult result;

  auto score = [&](EpochRecord& rec) {
    const auto batch = evaluate(model, valid);
    const auto f1 = metrics::f1_scores(batch);
    rec.micro_f1 = f1.micro;
    rec.macro_f1 = f1.macro;
    rec.mece = metrics::mece(batch).mean;
    switch (config.criterion) {
      case StopCriterion::kMicroF1: rec.criterion_value = rec.micro_f1; break;
      case StopCriterion::kMece: rec.criterion_value = rec.mece; break;
      case StopCriterion::kQuantMse:
        rec.criterion_value = refined_group_mse(model, refiner, valid, valid_groups);
        break;
    }
    rec.improved = stop.observe(rec.criterion_value);
    result.history.push_back(rec);
    if (observer) observer(rec);
  };

  EpochRecord initial;
  initial.stage = "clq";
  score(initial);
  auto best_model = model.params().values();
  auto best_refiner = refiner.params().values();
  result.best_value = stop.best();

  std::vector<Document> order(train.begin(), train.end());
  for (int epoch = 1; epoch <= config.max_epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), state.rng);
    const auto stats = clq_epoch(model, refiner, order, acc, state);
    EpochRecord rec;
    rec.stage = "clq";
    rec.epoch = epoch;
    rec.lr = config.lr0 * diff::linear_lr(std::min(state.step, state.total_steps - 1),
                                          state.total_steps, 1.0);
    rec.train_loss = stats.classification_loss;
    rec.quant_loss = stats.quant_loss;
    score(rec);
    result.epochs_run = epoch;
    if (rec.improved) {
      best_model = model.params().values();
      best_refiner = refiner.params().values();
      result.best_epoch = epoch;
    }
    if (stop.exhausted()) break;
  }
  model.params().values() = std::move(best_model);
  refiner.params().values() = std::move(best_refiner);
  result.best_value = stop.best();
  return result;
}

}  // namespace msam::train
