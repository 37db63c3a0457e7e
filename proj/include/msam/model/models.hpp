// Copyright 2026 The MSAM Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <random>
#include <span>

#include "msam/model/msam_head.hpp"
#include "msam/text/chunker.hpp"
#include "msam/text/encoder.hpp"

namespace msam::model {

struct ChunkingConfig {
  std::int64_t chunk_len = 512;  // T
  std::int64_t overlap = 255;
};

// Chunk encoding + multi-synonym attention: every chunk is encoded
// independently, scored for all codes, and the per-code logits are
// max-pooled over chunks before the sigmoid.
template <typename T>
class CeMsamModel final : public Classifier<T> {
 public:
  CeMsamModel(const text::EncoderConfig& encoder, std::int64_t overlap, std::int64_t heads,
              synsel::CodeEmbeddings<T> codes, std::mt19937_64& rng);
  // Rebinds to existing parameters (e.g. from a checkpoint).
  CeMsamModel(const text::EncoderConfig& encoder, std::int64_t overlap, std::int64_t heads,
              synsel::CodeEmbeddings<T> codes, ParameterSet<T> params);

  Var forward(ParamBinding<T>& bind, const text::Document& doc) const override;
  int num_codes() const override { return codes_.codes(); }
  std::string kind() const override { return "ce-msam"; }

  // C x L chunk logits for an arbitrary chunk set.
  Var chunk_logit_matrix(ParamBinding<T>& bind, std::span<const text::Chunk> chunks) const;
  // 1 x L max-pooled logits over `chunks`.
  Var forward_chunks(ParamBinding<T>& bind, std::span<const text::Chunk> chunks) const;

  const text::Encoder<T>& encoder() const { return encoder_; }
  const MsamHead<T>& head() const { return head_; }
  const synsel::CodeEmbeddings<T>& codes() const { return codes_; }
  std::int64_t overlap() const { return overlap_; }

 private:
  text::Encoder<T> encoder_;
  MsamHead<T> head_;
  synsel::CodeEmbeddings<T> codes_;
  std::int64_t overlap_;
};

// Baseline: encodes only the first T - 2 tokens as [CLS] ... [SEP] and
// applies an L-way affine map to the CLS vector.
template <typename T>
class BmModel final : public Classifier<T> {
 public:
  BmModel(const text::EncoderConfig& encoder, int codes, std::mt19937_64& rng);
  BmModel(const text::EncoderConfig& encoder, int codes, ParameterSet<T> params);

  Var forward(ParamBinding<T>& bind, const text::Document& doc) const override;
  int num_codes() const override { return codes_; }
  std::string kind() const override { return "bm"; }

  const text::Encoder<T>& encoder() const { return encoder_; }

 private:
  text::Encoder<T> encoder_;
  int codes_;
  std::size_t weight_ = 0, bias_ = 0;
};

extern template class CeMsamModel<float>;
extern template class CeMsamModel<double>;
extern template class BmModel<float>;
extern template class BmModel<double>;

}  // namespace msam::model
