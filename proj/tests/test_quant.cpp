// Copyright 2026 The MSAM Authors.
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <random>
#include <set>

#include "msam/error.hpp"
#include "msam/quant/quant.hpp"
#include "msam/train/clq.hpp"

namespace msam::quant {
namespace {

namespace fs = std::filesystem;
using Rows = std::vector<std::vector<double>>;

TEST(Estimators, ClassifyAndCount) {
  EXPECT_EQ(cc_estimate(Rows{{1.0, 1.0}, {1.0, 1.0}}), (std::vector<double>{1.0, 1.0}));
  EXPECT_EQ(cc_estimate(Rows{{0.6, 0.4}}), (std::vector<double>{1.0, 0.0}));
  EXPECT_EQ(cc_estimate(Rows{{0.9}, {0.7}, {0.2}, {0.1}}), (std::vector<double>{0.5}));
  EXPECT_EQ(cc_estimate(Rows{{0.5}}), (std::vector<double>{1.0}));
  EXPECT_THROW(cc_estimate(Rows{}), Error);
}

TEST(Estimators, ProbabilisticClassifyAndCount) {
  EXPECT_EQ(pcc_estimate(Rows{{0.3, 0.9}}), (std::vector<double>{0.3, 0.9}));
  EXPECT_NEAR(pcc_estimate(Rows{{0.2}, {0.8}})[0], 0.5, 1e-15);
  EXPECT_THROW(pcc_estimate(Rows{}), Error);
}

TEST(Estimators, PccIsSizeWeightedMeanOfParts) {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = 2 + rng() % 30;
    Rows rows(n, std::vector<double>(4));
    for (auto& r : rows) {
      for (auto& x : r) x = u(rng);
    }
    const std::size_t cut = 1 + rng() % (n - 1);
    const Rows left(rows.begin(), rows.begin() + static_cast<std::ptrdiff_t>(cut));
    const Rows right(rows.begin() + static_cast<std::ptrdiff_t>(cut), rows.end());
    const auto whole = pcc_estimate(rows), a = pcc_estimate(left), b = pcc_estimate(right);
    const auto cc = cc_estimate(rows);
    for (std::size_t l = 0; l < 4; ++l) {
      const double mixed = (a[l] * cut + b[l] * (n - cut)) / n;
      EXPECT_NEAR(whole[l], mixed, 1e-12);
      EXPECT_GE(whole[l], 0.0);
      EXPECT_LE(whole[l], 1.0);
      EXPECT_GE(cc[l], 0.0);
      EXPECT_LE(cc[l], 1.0);
    }
  }
}

TEST(Estimators, StreamingAccumulatorMatchesPcc) {
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  train::GroupAccumulator acc(3);
  acc.reset(500);
  Rows rows;
  for (int i = 0; i < 500; ++i) {
    rows.push_back({u(rng), u(rng), u(rng)});
    acc.add(rows.back(), std::vector<int>{});
    const auto batch = pcc_estimate(rows);
    const auto streamed = acc.pcc();
    for (int l = 0; l < 3; ++l) ASSERT_NEAR(streamed[l], batch[l], 1e-6);
  }
}

std::vector<text::Document> labelled_docs(int n, int L, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::bernoulli_distribution coin(0.3);
  std::vector<text::Document> docs;
  for (int i = 0; i < n; ++i) {
    text::Document d{"doc" + std::to_string(i), {4}, {}};
    for (int l = 0; l < L; ++l) {
      if (coin(rng)) d.gold_codes.push_back(l);
    }
    docs.push_back(std::move(d));
  }
  return docs;
}

TEST(Groups, PrevalenceCounting) {
  const std::vector<text::Document> docs{{"a", {4}, {0}}, {"b", {4}, {0, 1}}};
  const std::vector<std::size_t> both{0, 1}, first{0};
  EXPECT_EQ(group_prevalence(docs, both, 2), (std::vector<double>{1.0, 0.5}));
  EXPECT_EQ(group_prevalence(docs, first, 2), (std::vector<double>{1.0, 0.0}));
}

TEST(Groups, SizesCoverDecilesAndMembersAreDistinct) {
  const auto docs = labelled_docs(300, 5, 3);
  const auto groups = sample_groups(docs, 5, 5000, 4);
  ASSERT_EQ(groups.size(), 5000u);
  std::set<int> deciles;
  for (const auto& g : groups) {
    ASSERT_GE(g.size(), 1);
    ASSERT_LE(g.size(), 300);
    deciles.insert(std::min(9, (g.size() - 1) * 10 / 300));
    const std::set<std::size_t> unique(g.members.begin(), g.members.end());
    ASSERT_EQ(unique.size(), g.members.size());
    ASSERT_EQ(g.prevalence, group_prevalence(docs, g.members, 5));
  }
  EXPECT_GE(deciles.size(), 10u);
}

TEST(Groups, ExtremeSizes) {
  const auto docs = labelled_docs(4, 3, 5);
  const std::vector<std::size_t> all{0, 1, 2, 3};
  const auto whole = group_prevalence(docs, all, 3);
  bool saw_one = false, saw_all = false;
  for (const auto& g : sample_groups(docs, 3, 200, 6)) {
    if (g.size() == 1) {
      saw_one = true;
      const auto y = docs[g.members[0]].label_vector(3);
      for (int l = 0; l < 3; ++l) EXPECT_EQ(g.prevalence[l], y[l]);
    }
    if (g.size() == 4) {
      saw_all = true;
      EXPECT_EQ(g.prevalence, whole);
    }
  }
  EXPECT_TRUE(saw_one);
  EXPECT_TRUE(saw_all);
}

TEST(Groups, SeededSamplingIsReproducible) {
  const auto docs = labelled_docs(50, 3, 7);
  const auto a = sample_groups(docs, 3, 100, 8);
  const auto b = sample_groups(docs, 3, 100, 8);
  const auto c = sample_groups(docs, 3, 100, 9);
  ASSERT_EQ(a.size(), b.size());
  bool differs = false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(a[i].members, b[i].members);
    differs = differs || a[i].members != c[i].members;
  }
  EXPECT_TRUE(differs);
}

TEST(Groups, FileRoundTrip) {
  const auto dir = fs::temp_directory_path() / "msam_quant_groups";
  fs::create_directories(dir);
  const auto docs = labelled_docs(20, 3, 10);
  const auto groups = sample_groups(docs, 3, 30, 11);
  write_groups(dir / "g.jsonl", groups, docs);
  const auto back = read_groups(dir / "g.jsonl", docs, 3);
  ASSERT_EQ(back.size(), groups.size());
  for (std::size_t i = 0; i < back.size(); ++i) {
    EXPECT_EQ(back[i].members, groups[i].members);
    EXPECT_EQ(back[i].prevalence, groups[i].prevalence);
  }
  std::ofstream(dir / "bad.jsonl") << R"({"ids":["nope"],"size":1})" << '\n';
  EXPECT_THROW(read_groups(dir / "bad.jsonl", docs, 3), FormatError);
  std::ofstream(dir / "size.jsonl") << R"({"ids":["doc1"],"size":2})" << '\n';
  EXPECT_THROW(read_groups(dir / "size.jsonl", docs, 3), FormatError);
}

TEST(Refiner, ShapeRangeAndDeterminism) {
  std::mt19937_64 rng(12);
  auto r = Refiner<double>::create({5, 3}, rng);
  const std::vector<double> x{0.1, 0.0, 1.0, 0.5, 0.3};
  const auto y = r.refine(x);
  ASSERT_EQ(y.size(), 5u);
  EXPECT_EQ(r.refine(x), y);
  for (auto& t : r.params().values()) {
    for (auto& v : t.storage()) v *= 50.0;  // push toward saturation
  }
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<double> p(5);
    for (auto& v : p) v = u(rng);
    for (double v : r.refine(p)) {
      EXPECT_GE(v, 0.0);
      EXPECT_LE(v, 1.0);
    }
  }
  EXPECT_THROW(r.refine(std::vector<double>{0.1}), DimensionError);
  EXPECT_THROW(Refiner<double>::create({4, 4}, rng), Error);
  EXPECT_EQ(r.params().index_of("refiner.w1"), 0u);
}

// Codes 2 and 3 copy codes 0 and 1, so the prevalence vectors live on a
// two-dimensional set that an under-complete refiner can reproduce.
void identity_case(Rows& inputs, Rows& targets, int n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.35, 0.65);
  for (int i = 0; i < n; ++i) {
    const double a = u(rng), b = u(rng);
    inputs.push_back({a, b, a, b});
  }
  targets = inputs;
}

TEST(RefinerTraining, IdentityAchievableCaseConverges) {
  Rows inputs, targets;
  identity_case(inputs, targets, 400, 13);
  std::mt19937_64 rng(14);
  auto r = Refiner<float>::create({4, 3}, rng);
  RefinerTrainConfig cfg;
  cfg.lr0 = 1e-2;
  cfg.max_epochs = 300;
  cfg.patience = 300;
  const auto res = train_refiner_standalone(r, inputs, targets, cfg);
  ASSERT_FALSE(res.train_loss.empty());
  const double best = *std::min_element(res.train_loss.begin(), res.train_loss.end());
  EXPECT_LT(best, 1e-4);
  EXPECT_LT(res.best_holdout, 1e-4);
}

TEST(RefinerTraining, ZeroEpochsLeavesRefinerUnchanged) {
  Rows inputs, targets;
  identity_case(inputs, targets, 20, 15);
  std::mt19937_64 rng(16);
  auto r = Refiner<float>::create({4, 3}, rng);
  const auto before = diff::hash_tensors(r.params().values());
  RefinerTrainConfig cfg;
  cfg.max_epochs = 0;
  const auto res = train_refiner_standalone(r, inputs, targets, cfg);
  EXPECT_EQ(res.epochs, 0);
  EXPECT_EQ(diff::hash_tensors(r.params().values()), before);
}

TEST(RefinerTraining, SeededRunIsBitReproducible) {
  Rows inputs, targets;
  identity_case(inputs, targets, 60, 17);
  auto run = [&] {
    std::mt19937_64 rng(18);
    auto r = Refiner<float>::create({4, 2}, rng);
    RefinerTrainConfig cfg;
    cfg.lr0 = 1e-3;
    cfg.max_epochs = 20;
    train_refiner_standalone(r, inputs, targets, cfg);
    return diff::hash_tensors(r.params().values());
  };
  EXPECT_EQ(run(), run());
}

TEST(RefinerTraining, RestoresBestHoldoutState) {
  Rows inputs, targets;
  identity_case(inputs, targets, 60, 19);
  std::mt19937_64 rng(20);
  auto r = Refiner<float>::create({4, 2}, rng);
  RefinerTrainConfig cfg;
  cfg.lr0 = 0.5;  // large enough to overshoot
  cfg.max_epochs = 15;
  cfg.patience = 3;
  const auto res = train_refiner_standalone(r, inputs, targets, cfg);
  // The restored state is the best one seen, including the starting point.
  const double best_seen = std::min(res.best_holdout,
                                    *std::min_element(res.holdout_loss.begin(), res.holdout_loss.end()));
  EXPECT_DOUBLE_EQ(res.best_holdout, best_seen);
}

TEST(Estimates, CsvLayout) {
  const auto dir = fs::temp_directory_path() / "msam_quant_est";
  fs::create_directories(dir);
  const std::vector<EstimateRow> rows{{0, "pcc", 1, 0.25, 0.5}};
  write_estimates(dir / "e.csv", rows);
  std::ifstream in(dir / "e.csv");
  std::string header, line;
  std::getline(in, header);
  std::getline(in, line);
  EXPECT_EQ(header, "group_id,method,class,estimate,truth");
  EXPECT_EQ(line.substr(0, 8), "0,pcc,1,");
}

}  // namespace
}  // namespace msam::quant
