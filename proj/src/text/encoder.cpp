// Copyright 2026 The MSAM Authors.
// SPDX-License-Identifier: Apache-2.0

#include "msam/text/encoder.hpp"

#include <fmt/format.h>

#include <cmath>

#include "msam/error.hpp"

namespace msam::text {

void EncoderConfig::validate() const {
  if (vocab_size <= kFirstWord - 1) throw Error("encoder: vocabulary too small");
  if (max_len < 3) throw Error("encoder: max_len must be at least 3");
  if (hidden <= 0 || heads <= 0 || hidden % heads != 0) {
    throw Error(fmt::format("encoder: hidden {} must be divisible by heads {}", hidden, heads));
  }
  if (ffn <= 0 || blocks < 0) throw Error("encoder: invalid feed-forward or block count");
}

namespace {

std::string block_name(int b, const char* leaf) { return fmt::format("encoder.block{}.{}", b, leaf); }

}  // namespace

template <typename T>
Encoder<T>::Encoder(const EncoderConfig& config, const ParameterSet<T>& params) : config_(config) {
  config_.validate();
  auto lookup = [&](const std::string& name, std::int64_t rows, std::int64_t cols) {
    const auto i = params.index_of(name);
    if (params[i].rows() != rows || params[i].cols() != cols) {
      throw DimensionError(fmt::format("parameter '{}' is {}, expected ({}x{})", name,
                                       diff::format_dims(params[i].dims()), rows, cols));
    }
    return i;
  };
  const auto H = config_.hidden;
  const auto F = config_.ffn;
  tok_ = lookup("encoder.tok_emb", config_.vocab_size, H);
  pos_ = lookup("encoder.pos_emb", config_.max_len, H);
  emb_ln_g_ = lookup("encoder.emb_ln.g", 1, H);
  emb_ln_b_ = lookup("encoder.emb_ln.b", 1, H);
  for (int b = 0; b < config_.blocks; ++b) {
    BlockIndex bi{};
    bi.wq = lookup(block_name(b, "wq"), H, H);
    bi.bq = lookup(block_name(b, "bq"), 1, H);
    bi.wk = lookup(block_name(b, "wk"), H, H);
    bi.bk = lookup(block_name(b, "bk"), 1, H);
    bi.wv = lookup(block_name(b, "wv"), H, H);
    bi.bv = lookup(block_name(b, "bv"), 1, H);
    bi.wo = lookup(block_name(b, "wo"), H, H);
    bi.bo = lookup(block_name(b, "bo"), 1, H);
    bi.ln1_g = lookup(block_name(b, "ln1.g"), 1, H);
    bi.ln1_b = lookup(block_name(b, "ln1.b"), 1, H);
    bi.w1 = lookup(block_name(b, "w1"), F, H);
    bi.b1 = lookup(block_name(b, "b1"), 1, F);
    bi.w2 = lookup(block_name(b, "w2"), H, F);
    bi.b2 = lookup(block_name(b, "b2"), 1, H);
    bi.ln2_g = lookup(block_name(b, "ln2.g"), 1, H);
    bi.ln2_b = lookup(block_name(b, "ln2.b"), 1, H);
    blocks_.push_back(bi);
  }
}

template <typename T>
Encoder<T> Encoder<T>::create(const EncoderConfig& config, ParameterSet<T>& params,
                              std::mt19937_64& rng) {
  config.validate();
  const auto H = config.hidden;
  const auto F = config.ffn;
  auto ones = [](std::int64_t n) { return Tensor<T>::matrix(1, n, T(1)); };
  auto zeros = [](std::int64_t n) { return Tensor<T>::matrix(1, n, T(0)); };
  params.add("encoder.tok_emb", diff::normal_tensor<T>(config.vocab_size, H, 0.02, rng));
  params.add("encoder.pos_emb", diff::normal_tensor<T>(config.max_len, H, 0.02, rng));
  params.add("encoder.emb_ln.g", ones(H));
  params.add("encoder.emb_ln.b", zeros(H));
  for (int b = 0; b < config.blocks; ++b) {
    for (const char* w : {"wq", "wk", "wv", "wo"}) {
      params.add(block_name(b, w), diff::glorot_uniform<T>(H, H, rng));
      params.add(block_name(b, (std::string("b") + w[1]).c_str()), zeros(H));
    }
    params.add(block_name(b, "ln1.g"), ones(H));
    params.add(block_name(b, "ln1.b"), zeros(H));
    params.add(block_name(b, "w1"), diff::glorot_uniform<T>(F, H, rng));
    params.add(block_name(b, "b1"), zeros(F));
    params.add(block_name(b, "w2"), diff::glorot_uniform<T>(H, F, rng));
    params.add(block_name(b, "b2"), zeros(H));
    params.add(block_name(b, "ln2.g"), ones(H));
    params.add(block_name(b, "ln2.b"), zeros(H));
  }
  return Encoder(config, params);
}

template <typename T>
Encoder<T> Encoder<T>::attach(const EncoderConfig& config, const ParameterSet<T>& params) {
  return Encoder(config, params);
}

template <typename T>
Var Encoder<T>::encode(ParamBinding<T>& bind, std::span<const TokenId> ids,
                       std::span<const std::uint8_t> mask) const {
  auto& g = bind.graph();
  const auto n = static_cast<std::int64_t>(ids.size());
  if (n == 0 || n > config_.max_len) {
    throw DimensionError(fmt::format("encoder: sequence length {} outside [1, {}]", n,
                                     config_.max_len));
  }
  if (mask.size() != ids.size()) throw DimensionError("encoder: mask length mismatch");

  Var x = g.add(g.gather_rows(bind(tok_), ids), g.slice_rows(bind(pos_), 0, n));
  x = g.layer_norm_rows(x, bind(emb_ln_g_), bind(emb_ln_b_));

  const auto H = config_.hidden;
  const auto dh = H / config_.heads;
  const T inv_sqrt = T(1) / std::sqrt(static_cast<T>(dh));
  for (const auto& bi : blocks_) {
    const Var q = g.scale(g.add_row(g.matmul_nt(x, bind(bi.wq)), bind(bi.bq)), inv_sqrt);
    const Var k = g.add_row(g.matmul_nt(x, bind(bi.wk)), bind(bi.bk));
    const Var v = g.add_row(g.matmul_nt(x, bind(bi.wv)), bind(bi.bv));
    std::vector<Var> head_out;
    head_out.reserve(static_cast<std::size_t>(config_.heads));
    for (std::int64_t h = 0; h < config_.heads; ++h) {
      const Var qh = g.slice_cols(q, h * dh, (h + 1) * dh);
      const Var kh = g.slice_cols(k, h * dh, (h + 1) * dh);
      const Var vh = g.slice_cols(v, h * dh, (h + 1) * dh);
      const Var att = g.softmax_rows(g.matmul_nt(qh, kh), mask);
      head_out.push_back(g.matmul(att, vh));
    }
    const Var attn = g.add_row(g.matmul_nt(g.concat_cols(head_out), bind(bi.wo)), bind(bi.bo));
    x = g.layer_norm_rows(g.add(x, attn), bind(bi.ln1_g), bind(bi.ln1_b));
    const Var hidden = g.relu(g.add_row(g.matmul_nt(x, bind(bi.w1)), bind(bi.b1)));
    const Var ff = g.add_row(g.matmul_nt(hidden, bind(bi.w2)), bind(bi.b2));
    x = g.layer_norm_rows(g.add(x, ff), bind(bi.ln2_g), bind(bi.ln2_b));
  }
  return x;
}

template <typename T>
Var Encoder<T>::encode_chunk(ParamBinding<T>& bind, const Chunk& chunk) const {
  if (static_cast<std::int64_t>(chunk.ids.size()) != config_.max_len) {
    throw DimensionError(fmt::format("encoder: chunk length {} but T = {}", chunk.ids.size(),
                                     config_.max_len));
  }
  for (auto id : chunk.ids) {
    if (id < 0 || id >= config_.vocab_size) {
      throw DimensionError(fmt::format("encoder: token id {} outside vocabulary of {}", id,
                                       config_.vocab_size));
    }
  }
  return encode(bind, chunk.ids, chunk.mask);
}

template <typename T>
Var Encoder<T>::encode_text_cls(ParamBinding<T>& bind, std::span<const TokenId> tokens) const {
  if (static_cast<std::int64_t>(tokens.size()) > config_.max_len - 2) {
    throw DimensionError(fmt::format("encoder: {} tokens leave no room for CLS and SEP (T = {})",
                                     tokens.size(), config_.max_len));
  }
  std::vector<TokenId> ids;
  ids.reserve(tokens.size() + 2);
  ids.push_back(kCls);
  ids.insert(ids.end(), tokens.begin(), tokens.end());
  ids.push_back(kSep);
  const std::vector<std::uint8_t> mask(ids.size(), 1);
  auto& g = bind.graph();
  return g.slice_rows(encode(bind, ids, mask), 0, 1);
}

template <typename T>
Tensor<T> Encoder<T>::chunk_representation(const ParameterSet<T>& params,
                                           const Chunk& chunk) const {
  diff::Graph<T> g;
  ParamBinding<T> bind(g, params);
  return g.value(encode_chunk(bind, chunk));
}

template <typename T>
Tensor<T> Encoder<T>::cls_vector(const ParameterSet<T>& params,
                                 std::span<const TokenId> tokens) const {
  diff::Graph<T> g;
  ParamBinding<T> bind(g, params);
  return g.value(encode_text_cls(bind, tokens));
}

template class Encoder<float>;
template class Encoder<double>;

}  // namespace msam::text
