// Copyright 2026 The MSAM Authors.
// SPDX-License-Identifier: Apache-2.0

#include "msam/quant/quant.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <fstream>
#include <json.hpp>
#include <numeric>
#include <unordered_map>

#include "msam/diff/optim.hpp"
#include "msam/error.hpp"

namespace msam::quant {

using nlohmann::json;

namespace {

std::size_t check_rows(ProbabilityRows probs) {
  if (probs.empty()) throw Error("prevalence estimate of an empty group");
  const std::size_t L = probs[0].size();
  if (L == 0) throw DimensionError("prevalence estimate: zero classes");
  for (const auto& row : probs) {
    if (row.size() != L) throw DimensionError("prevalence estimate: ragged probability rows");
  }
  return L;
}

}  // namespace

std::vector<double> cc_estimate(ProbabilityRows probs, double threshold) {
  const std::size_t L = check_rows(probs);
  std::vector<double> out(L, 0.0);
  for (const auto& row : probs) {
    for (std::size_t l = 0; l < L; ++l) out[l] += row[l] >= threshold ? 1.0 : 0.0;
  }
  for (double& v : out) v /= static_cast<double>(probs.size());
  return out;
}

std::vector<double> pcc_estimate(ProbabilityRows probs) {
  const std::size_t L = check_rows(probs);
  std::vector<double> out(L, 0.0);
  for (const auto& row : probs) {
    for (std::size_t l = 0; l < L; ++l) out[l] += row[l];
  }
  for (double& v : out) v /= static_cast<double>(probs.size());
  return out;
}

void RefinerConfig::validate() const {
  if (codes < 2) throw Error(fmt::format("refiner needs at least 2 codes, got {}", codes));
  if (hidden < 1 || hidden >= codes) {
    throw Error(fmt::format("refiner hidden size {} must lie in [1, {})", hidden, codes));
  }
}

template <typename T>
Refiner<T>::Refiner(const RefinerConfig& config, ParameterSet<T> params)
    : config_(config), params_(std::move(params)) {
  config_.validate();
  w1_ = params_.index_of("refiner.w1");
  b1_ = params_.index_of("refiner.b1");
  w2_ = params_.index_of("refiner.w2");
  b2_ = params_.index_of("refiner.b2");
  const auto expect = [&](std::size_t i, std::int64_t r, std::int64_t c) {
    if (params_[i].rows() != r || params_[i].cols() != c) {
      throw DimensionError(fmt::format("{} is {} but expected [{}, {}]", params_.name(i),
                                       diff::format_dims(params_[i].dims()), r, c));
    }
  };
  expect(w1_, config_.hidden, config_.codes);
  expect(b1_, 1, config_.hidden);
  expect(w2_, config_.codes, config_.hidden);
  expect(b2_, 1, config_.codes);
}

template <typename T>
Refiner<T> Refiner<T>::create(const RefinerConfig& config, std::mt19937_64& rng) {
  config.validate();
  ParameterSet<T> params;
  params.add("refiner.w1", diff::glorot_uniform<T>(config.hidden, config.codes, rng));
  params.add("refiner.b1", diff::Tensor<T>::matrix(1, config.hidden));
  params.add("refiner.w2", diff::glorot_uniform<T>(config.codes, config.hidden, rng));
  params.add("refiner.b2", diff::Tensor<T>::matrix(1, config.codes));
  return Refiner(config, std::move(params));
}

template <typename T>
Refiner<T> Refiner<T>::attach(const RefinerConfig& config, ParameterSet<T> params) {
  return Refiner(config, std::move(params));
}

template <typename T>
Var Refiner<T>::forward(ParamBinding<T>& bind, Var pcc) const {
  auto& g = bind.graph();
  const auto& x = g.value(pcc);
  if (x.rows() != 1 || x.cols() != config_.codes) {
    throw DimensionError(fmt::format("refiner input is {} but expected [1, {}]",
                                     diff::format_dims(x.dims()), config_.codes));
  }
  const Var hidden = g.relu(g.add_row(g.matmul_nt(pcc, bind(w1_)), bind(b1_)));
  return g.sigmoid(g.add_row(g.matmul_nt(hidden, bind(w2_)), bind(b2_)));
}

template <typename T>
std::vector<double> Refiner<T>::refine(std::span<const double> pcc) const {
  if (static_cast<int>(pcc.size()) != config_.codes) {
    throw DimensionError(
        fmt::format("refiner input has {} entries but expected {}", pcc.size(), config_.codes));
  }
  diff::Graph<T> g;
  ParamBinding<T> bind(g, params_);
  auto input = diff::Tensor<T>::matrix(1, config_.codes);
  std::transform(pcc.begin(), pcc.end(), input.data().begin(),
                 [](double v) { return static_cast<T>(v); });
  const auto& out = g.value(forward(bind, g.constant(std::move(input))));
  return {out.data().begin(), out.data().end()};
}

template class Refiner<float>;
template class Refiner<double>;

std::vector<double> group_prevalence(std::span<const text::Document> docs,
                                     std::span<const std::size_t> members, int num_codes) {
  if (members.empty()) throw Error("group has no members");
  std::vector<double> p(static_cast<std::size_t>(num_codes), 0.0);
  for (auto m : members) {
    if (m >= docs.size()) throw DimensionError("group member index out of range");
    for (int c : docs[m].gold_codes) {
      if (c < 0 || c >= num_codes) throw DimensionError("gold code out of range");
      p[static_cast<std::size_t>(c)] += 1.0;
    }
  }
  for (double& v : p) v /= static_cast<double>(members.size());
  return p;
}

std::vector<QuantGroup> sample_groups(std::span<const text::Document> docs, int num_codes,
                                      int count, std::uint64_t seed) {
  if (docs.empty()) throw Error("cannot sample groups from an empty document set");
  if (count < 1) throw Error("group count must be positive");
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::size_t> size_dist(1, docs.size());
  std::vector<std::size_t> pool(docs.size());
  std::vector<QuantGroup> groups;
  groups.reserve(static_cast<std::size_t>(count));
  for (int k = 0; k < count; ++k) {
    const std::size_t size = size_dist(rng);
    std::iota(pool.begin(), pool.end(), std::size_t{0});
    // Partial Fisher-Yates: the first `size` slots are a uniform sample.
    for (std::size_t i = 0; i < size; ++i) {
      std::uniform_int_distribution<std::size_t> pick(i, pool.size() - 1);
      std::swap(pool[i], pool[pick(rng)]);
    }
    QuantGroup group;
    group.members.assign(pool.begin(), pool.begin() + static_cast<std::ptrdiff_t>(size));
    group.prevalence = group_prevalence(docs, group.members, num_codes);
    groups.push_back(std::move(group));
  }
  return groups;
}

void write_groups(const std::filesystem::path& path, std::span<const QuantGroup> groups,
                  std::span<const text::Document> docs) {
  std::ofstream out(path);
  if (!out) throw Error(fmt::format("cannot write groups file {}", path.string()));
  for (const auto& group : groups) {
    json ids = json::array();
    for (auto m : group.members) ids.push_back(docs[m].id);
    out << json{{"ids", ids}, {"size", group.size()}}.dump() << '\n';
  }
}

std::vector<QuantGroup> read_groups(const std::filesystem::path& path,
                                    std::span<const text::Document> docs, int num_codes) {
  std::ifstream in(path);
  if (!in) throw Error(fmt::format("cannot read groups file {}", path.string()));
  std::unordered_map<std::string, std::size_t> index;
  for (std::size_t i = 0; i < docs.size(); ++i) index.emplace(docs[i].id, i);
  std::vector<QuantGroup> groups;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    QuantGroup group;
    try {
      const auto j = json::parse(line);
      for (const auto& id : j.at("ids")) {
        const auto it = index.find(id.get<std::string>());
        if (it == index.end()) {
          throw FormatError(fmt::format("{}:{}: unknown document id {}", path.string(), line_no,
                                        id.get<std::string>()));
        }
        group.members.push_back(it->second);
      }
      if (j.at("size").get<int>() != group.size()) {
        throw FormatError(fmt::format("{}:{}: size does not match the id list", path.string(),
                                      line_no));
      }
    } catch (const json::exception& e) {
      throw FormatError(fmt::format("{}:{}: {}", path.string(), line_no, e.what()));
    }
    group.prevalence = group_prevalence(docs, group.members, num_codes);
    groups.push_back(std::move(group));
  }
  return groups;
}

namespace {

double refiner_loss(const Refiner<float>& refiner, std::span<const std::vector<double>> inputs,
                    std::span<const std::vector<double>> targets,
                    std::span<const std::size_t> rows) {
  double total = 0.0;
  for (auto r : rows) {
    const auto est = refiner.refine(inputs[r]);
    for (std::size_t l = 0; l < est.size(); ++l) {
      const double d = est[l] - targets[r][l];
      total += d * d;
    }
  }
  return rows.empty() ? 0.0 : total / static_cast<double>(rows.size());
}

}  // namespace

RefinerTrainResult train_refiner_standalone(Refiner<float>& refiner,
                                            std::span<const std::vector<double>> pcc_inputs,
                                            std::span<const std::vector<double>> targets,
                                            const RefinerTrainConfig& config) {
  if (pcc_inputs.size() != targets.size()) {
    throw DimensionError("refiner training: inputs and targets must align");
  }
  if (pcc_inputs.size() < 2) throw Error("refiner training needs at least two groups");
  if (config.batch_size < 1 || config.patience < 1 || config.max_epochs < 0) {
    throw Error("refiner training: invalid batch size, patience or epoch budget");
  }
  if (!(config.holdout_fraction > 0.0 && config.holdout_fraction < 1.0)) {
    throw Error("refiner training: holdout fraction must lie in (0, 1)");
  }
  const auto L = static_cast<std::size_t>(refiner.config().codes);
  for (std::size_t i = 0; i < pcc_inputs.size(); ++i) {
    if (pcc_inputs[i].size() != L || targets[i].size() != L) {
      throw DimensionError("refiner training: vector length differs from the code count");
    }
  }

  std::mt19937_64 rng(config.seed);
  std::vector<std::size_t> order(pcc_inputs.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::shuffle(order.begin(), order.end(), rng);
  const auto n_hold = std::clamp<std::size_t>(
      static_cast<std::size_t>(config.holdout_fraction * static_cast<double>(order.size())), 1,
      order.size() - 1);
  std::vector<std::size_t> holdout(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(n_hold));
  std::vector<std::size_t> train(order.begin() + static_cast<std::ptrdiff_t>(n_hold), order.end());

  RefinerTrainResult result;
  result.best_holdout = refiner_loss(refiner, pcc_inputs, targets, holdout);
  if (config.max_epochs == 0) return result;

  auto best_params = refiner.params().values();
  diff::Adam<float> adam(refiner.params());
  const auto batches =
      static_cast<std::int64_t>((train.size() + static_cast<std::size_t>(config.batch_size) - 1) /
                                static_cast<std::size_t>(config.batch_size));
  const std::int64_t total_steps = batches * config.max_epochs;
  std::int64_t step = 0;
  int stale = 0;
  std::vector<float> target(L);

  for (int epoch = 1; epoch <= config.max_epochs; ++epoch) {
    std::shuffle(train.begin(), train.end(), rng);
    double epoch_loss = 0.0;
    for (std::size_t start = 0; start < train.size(); start += static_cast<std::size_t>(config.batch_size)) {
      const std::size_t end = std::min(train.size(), start + static_cast<std::size_t>(config.batch_size));
      auto grads = refiner.params().zeros_like();
      for (std::size_t k = start; k < end; ++k) {
        const auto r = train[k];
        diff::Graph<float> g;
        ParamBinding<float> bind(g, refiner.params());
        auto input = diff::Tensor<float>::matrix(1, static_cast<std::int64_t>(L));
        for (std::size_t l = 0; l < L; ++l) {
          input.data()[l] = static_cast<float>(pcc_inputs[r][l]);
          target[l] = static_cast<float>(targets[r][l]);
        }
        const Var loss = g.squared_error(refiner.forward(bind, g.constant(std::move(input))), target);
        epoch_loss += g.value(loss).data()[0];
        g.backward(loss);
        bind.accumulate(grads);
      }
      const float inv = 1.0f / static_cast<float>(end - start);
      for (auto& t : grads) {
        for (auto& v : t.data()) v *= inv;
      }
      adam.step(refiner.params(), grads, diff::linear_lr(step, total_steps, config.lr0));
      ++step;
    }
    result.train_loss.push_back(epoch_loss / static_cast<double>(train.size()));
    const double hold = refiner_loss(refiner, pcc_inputs, targets, holdout);
    result.holdout_loss.push_back(hold);
    result.epochs = epoch;
    if (hold < result.best_holdout) {
      result.best_holdout = hold;
      best_params = refiner.params().values();
      stale = 0;
    } else if (++stale >= config.patience) {
      break;
    }
  }
  refiner.params().values() = best_params;
  return result;
}

void write_estimates(const std::filesystem::path& path, std::span<const EstimateRow> rows) {
  std::ofstream out(path);
  if (!out) throw Error(fmt::format("cannot write estimates file {}", path.string()));
  out << "group_id,method,class,estimate,truth\n";
  for (const auto& row : rows) {
    out << fmt::format("{},{},{},{:.9g},{:.9g}\n", row.group, row.method, row.cls, row.estimate,
                       row.truth);
  }
}

}  // namespace msam::quant
