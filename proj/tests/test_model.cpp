// Copyright 2026 The MSAM Authors.
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "model_check.hpp"
#include "msam/error.hpp"
#include "msam/model/models.hpp"
#include "msam/model/msam_head.hpp"
#include "msam/text/chunker.hpp"

namespace msam::model {
namespace {

using TD = Tensor<double>;

synsel::CodeEmbeddings<double> random_codes(int L, int M, std::int64_t H, std::mt19937_64& rng) {
  synsel::CodeEmbeddings<double> codes;
  for (int l = 0; l < L; ++l) codes.queries.push_back(diff::normal_tensor<double>(M, H, 1.0, rng));
  codes.recompute_pooled();
  return codes;
}

text::EncoderConfig encoder_config(std::int64_t T, std::int64_t H) {
  text::EncoderConfig c;
  c.vocab_size = 30;
  c.max_len = T;
  c.hidden = H;
  c.heads = 2;
  c.ffn = 16;
  c.blocks = 1;
  return c;
}

std::vector<text::TokenId> random_tokens(std::size_t n, std::mt19937_64& rng) {
  std::uniform_int_distribution<text::TokenId> id(text::kFirstWord, 29);
  std::vector<text::TokenId> out(n);
  for (auto& t : out) t = id(rng);
  return out;
}

// Straight-line evaluation of one chunk's logits from plain loops.
std::vector<double> reference_logits(const TD& K, std::span<const std::uint8_t> mask,
                                     const synsel::CodeEmbeddings<double>& codes, const TD& wq,
                                     const TD& wk, const TD& w, std::int64_t Z) {
  const auto T = K.rows(), H = K.cols(), d = H / Z;
  const int L = codes.codes();
  std::vector<double> logits(static_cast<std::size_t>(L));
  for (int l = 0; l < L; ++l) {
    std::vector<double> r(static_cast<std::size_t>(H), 0.0);
    for (std::int64_t z = 0; z < Z; ++z) {
      std::vector<double> q(static_cast<std::size_t>(d), 0.0);
      for (std::int64_t a = 0; a < d; ++a) {
        for (std::int64_t b = 0; b < H; ++b) q[a] += wq.at(a, b) * codes.queries[l].at(z, b);
      }
      std::vector<double> s(static_cast<std::size_t>(T));
      double mx = -1e300;
      for (std::int64_t t = 0; t < T; ++t) {
        double dot = 0.0;
        for (std::int64_t a = 0; a < d; ++a) {
          double key = 0.0;
          for (std::int64_t b = 0; b < d; ++b) key += wk.at(a, b) * K.at(t, z * d + b);
          dot += q[a] * std::tanh(key);
        }
        s[t] = mask[t] != 0 ? dot : -1e9;
        mx = std::max(mx, s[t]);
      }
      double total = 0.0;
      for (auto& x : s) total += (x = std::exp(x - mx));
      for (std::int64_t t = 0; t < T; ++t) {
        for (std::int64_t b = 0; b < d; ++b) r[z * d + b] += s[t] / total * std::tanh(K.at(t, z * d + b));
      }
    }
    double logit = 0.0;
    for (std::int64_t a = 0; a < H; ++a) {
      for (std::int64_t b = 0; b < H; ++b) logit += r[a] * w.at(a, b) * codes.pooled.at(l, b);
    }
    logits[l] = logit;
  }
  return logits;
}

struct HeadFixture {
  static constexpr std::int64_t T = 6, H = 8, Z = 2;
  static constexpr int L = 3;
  ParameterSet<double> params;
  synsel::CodeEmbeddings<double> codes;
  std::optional<MsamHead<double>> head;

  explicit HeadFixture(std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    codes = random_codes(L, Z, H, rng);
    head = MsamHead<double>::create({H, Z, L}, params, rng);
  }
};

TEST(MsamHead, MatchesStraightLineEvaluation) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    HeadFixture f(seed);
    std::mt19937_64 rng(seed + 50);
    const auto K = diff::normal_tensor<double>(f.T, f.H, 1.0, rng);
    const std::vector<std::uint8_t> mask{1, 1, 1, 1, 0, 0};
    Graph<double> g;
    ParamBinding<double> bind(g, f.params);
    const auto prep = f.head->prepare(bind, f.codes);
    const auto& got = g.value(f.head->chunk_logits(bind, prep, g.constant(K), mask));
    const auto want = reference_logits(K, mask, f.codes, f.params[0], f.params[1], f.params[2], f.Z);
    for (int l = 0; l < f.L; ++l) EXPECT_NEAR(got[l], want[l], 1e-10);
  }
}

TEST(MsamHead, ScoresEqualDiagonalOfFullBiaffine) {
  HeadFixture f(3);
  std::mt19937_64 rng(9);
  const auto R = diff::normal_tensor<double>(f.L, f.H, 1.0, rng);
  Graph<double> g;
  ParamBinding<double> bind(g, f.params);
  const auto prep = f.head->prepare(bind, f.codes);
  const auto& got = g.value(f.head->score(g, g.constant(R), prep));
  // Full L x L matrix R W V^T, then its diagonal.
  const Var full = g.matmul_nt(g.matmul(g.constant(R), g.constant(f.params[2])), g.constant(f.codes.pooled));
  const auto& m = g.value(full);
  for (int l = 0; l < f.L; ++l) EXPECT_NEAR(got[l], m.at(l, l), 1e-12);
}

TEST(MsamHead, OneHotAttentionSelectsToken) {
  HeadFixture f(1);
  std::mt19937_64 rng(2);
  const auto K = diff::normal_tensor<double>(f.T, f.H, 1.0, rng);
  Graph<double> g;
  const Var k = g.constant(K);
  const auto heads = split_heads(g, k, f.Z);
  std::vector<Var> alphas;
  for (std::int64_t z = 0; z < f.Z; ++z) {
    TD a = TD::matrix(f.L, f.T);
    for (int l = 0; l < f.L; ++l) a.at(l, 2) = 1.0;
    alphas.push_back(g.constant(a));
  }
  const auto& r = g.value(f.head->code_text_repr(g, heads, alphas));
  for (int l = 0; l < f.L; ++l) {
    for (std::int64_t c = 0; c < f.H; ++c) EXPECT_NEAR(r.at(l, c), std::tanh(K.at(2, c)), 1e-15);
  }
}

TEST(MsamHead, Errors) {
  Graph<double> g;
  EXPECT_THROW(split_heads(g, g.constant(TD::matrix(2, 6)), 4), DimensionError);
  ParameterSet<double> params;
  std::mt19937_64 rng(0);
  EXPECT_THROW(MsamHead<double>::create({6, 4, 2}, params, rng), DimensionError);
  HeadFixture f(0);
  ParamBinding<double> bind(g, f.params);
  std::mt19937_64 r2(1);
  EXPECT_THROW(f.head->prepare(bind, random_codes(3, 3, 8, r2)), DimensionError);
}

struct ModelFixture {
  std::optional<CeMsamModel<double>> model;
  explicit ModelFixture(std::uint64_t seed, std::int64_t T = 8, std::int64_t H = 8, int L = 3,
                        std::int64_t Z = 2) {
    std::mt19937_64 rng(seed);
    model.emplace(encoder_config(T, H), T / 2 - 1, Z, random_codes(L, static_cast<int>(Z), H, rng), rng);
  }
};

std::vector<double> pooled(const CeMsamModel<double>& m, std::span<const text::Chunk> chunks) {
  Graph<double> g;
  ParamBinding<double> bind(g, m.params());
  const auto& v = g.value(m.forward_chunks(bind, chunks));
  return {v.data().begin(), v.data().end()};
}

TEST(CeMsam, SingleChunkMaxPoolIsIdentityAndDuplicationIsHarmless) {
  ModelFixture f(5);
  std::mt19937_64 rng(6);
  const auto chunks = text::chunk_document(random_tokens(5, rng), 8, 3);
  ASSERT_EQ(chunks.size(), 1u);
  Graph<double> g;
  ParamBinding<double> bind(g, f.model->params());
  const auto& one = g.value(f.model->chunk_logit_matrix(bind, chunks));
  const auto y = pooled(*f.model, chunks);
  for (std::size_t l = 0; l < y.size(); ++l) EXPECT_EQ(y[l], one[l]);
  const std::vector<text::Chunk> twice{chunks[0], chunks[0]};
  EXPECT_EQ(pooled(*f.model, twice), y);
}

TEST(CeMsam, PermutationAndAppendInvariants) {
  ModelFixture f(7);
  for (int trial = 0; trial < 100; ++trial) {
    std::mt19937_64 rng(static_cast<std::uint64_t>(trial));
    std::uniform_int_distribution<std::size_t> len(1, 30);
    auto chunks = text::chunk_document(random_tokens(len(rng), rng), 8, 3);
    const auto base = pooled(*f.model, chunks);
    auto shuffled = chunks;
    std::shuffle(shuffled.begin(), shuffled.end(), rng);
    ASSERT_EQ(pooled(*f.model, shuffled), base);
    chunks.push_back(text::chunk_document(random_tokens(len(rng), rng), 8, 3)[0]);
    const auto grown = pooled(*f.model, chunks);
    for (std::size_t l = 0; l < base.size(); ++l) ASSERT_GE(grown[l], base[l]);
  }
}

TEST(CeMsam, GradientMatchesFiniteDifferences) {
  ModelFixture f(11, 16, 16, 3, 4);
  std::mt19937_64 rng(12);
  const text::Document doc{"d", random_tokens(20, rng), {0, 2}};
  const auto y = doc.label_vector(3);
  const std::vector<double> target(y.begin(), y.end());
  const double err = oracle::model_gradient_error(*f.model, [&](ParamBinding<double>& bind) {
    return bind.graph().bce_with_logits(f.model->forward(bind, doc), target);
  });
  EXPECT_LT(err, 1e-4);
}

TEST(Bm, ShapesAndTruncation) {
  std::mt19937_64 rng(1);
  BmModel<double> bm(encoder_config(8, 8), 4, rng);
  const text::Document short_doc{"a", random_tokens(6, rng), {}};
  text::Document long_doc = short_doc;
  long_doc.tokens.push_back(5);
  long_doc.tokens.push_back(7);
  EXPECT_EQ(bm.predict(short_doc).size(), 4u);
  // Tokens past T - 2 are never seen.
  EXPECT_EQ(bm.predict(short_doc), bm.predict(long_doc));
  const double err = oracle::model_gradient_error(bm, [&](ParamBinding<double>& bind) {
    const std::vector<double> t{1, 0, 0, 1};
    return bind.graph().bce_with_logits(bm.forward(bind, short_doc), t);
  });
  EXPECT_LT(err, 1e-6);
}

TEST(Classifier, PredictIsSigmoidOfForward) {
  ModelFixture f(2);
  std::mt19937_64 rng(3);
  const text::Document doc{"d", random_tokens(12, rng), {}};
  Graph<double> g;
  ParamBinding<double> bind(g, f.model->params());
  const auto& logits = g.value(f.model->forward(bind, doc));
  const auto p = f.model->predict(doc);
  for (std::size_t l = 0; l < p.size(); ++l) EXPECT_NEAR(p[l], 1.0 / (1.0 + std::exp(-logits[l])), 1e-15);
}

}  // namespace
}  // namespace msam::model
