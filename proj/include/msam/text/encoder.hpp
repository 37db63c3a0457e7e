// Copyright 2026 The MSAM Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "msam/diff/params.hpp"
#include "msam/text/chunker.hpp"

namespace msam::text {

using diff::ParamBinding;
using diff::ParameterSet;
using diff::Tensor;
using diff::Var;

struct EncoderConfig {
  std::int64_t vocab_size = 0;
  std::int64_t max_len = 512;  // T
  std::int64_t hidden = 64;    // H
  std::int64_t heads = 4;      // self-attention heads
  std::int64_t ffn = 128;
  int blocks = 1;

  void validate() const;
};

// Small post-LN transformer: token + learned positional embeddings followed
// by `blocks` self-attention/feed-forward blocks. Parameters live in a
// ParameterSet owned by the caller under the "encoder." prefix.
template <typename T>
class Encoder {
 public:
  // Registers freshly initialised parameters.
  static Encoder create(const EncoderConfig& config, ParameterSet<T>& params,
                        std::mt19937_64& rng);
  // Binds to parameters that already exist (e.g. after loading a checkpoint).
  static Encoder attach(const EncoderConfig& config, const ParameterSet<T>& params);

  const EncoderConfig& config() const { return config_; }

  // n x H token representations; mask 0 excludes a key position from attention.
  Var encode(ParamBinding<T>& bind, std::span<const TokenId> ids,
             std::span<const std::uint8_t> mask) const;
  // T x H representations of a chunk.
  Var encode_chunk(ParamBinding<T>& bind, const Chunk& chunk) const;
  // 1 x H vector at the CLS slot of [CLS] tokens [SEP]; tokens.size() <= T - 2.
  Var encode_text_cls(ParamBinding<T>& bind, std::span<const TokenId> tokens) const;

  Tensor<T> chunk_representation(const ParameterSet<T>& params, const Chunk& chunk) const;
  Tensor<T> cls_vector(const ParameterSet<T>& params, std::span<const TokenId> tokens) const;

 private:
  struct BlockIndex {
    std::size_t wq, bq, wk, bk, wv, bv, wo, bo, ln1_g, ln1_b, w1, b1, w2, b2, ln2_g, ln2_b;
  };

  Encoder(const EncoderConfig& config, const ParameterSet<T>& params);

  EncoderConfig config_;
  std::size_t tok_ = 0, pos_ = 0, emb_ln_g_ = 0, emb_ln_b_ = 0;
  std::vector<BlockIndex> blocks_;
};

extern template class Encoder<float>;
extern template class Encoder<double>;

}  // namespace msam::text
