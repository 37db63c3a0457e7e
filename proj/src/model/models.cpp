// Copyright 2026 The MSAM Authors.
// SPDX-License-Identifier: Apache-2.0

#include "msam/model/models.hpp"

#include <fmt/format.h>

#include "msam/error.hpp"

namespace msam::model {

template <typename T>
std::vector<T> Classifier<T>::predict(const text::Document& doc) const {
  Graph<T> g;
  ParamBinding<T> bind(g, params_);
  const auto& probs = g.value(g.sigmoid(forward(bind, doc)));
  return {probs.data().begin(), probs.data().end()};
}

template class Classifier<float>;
template class Classifier<double>;

template <typename T>
CeMsamModel<T>::CeMsamModel(const text::EncoderConfig& encoder, std::int64_t overlap,
                            std::int64_t heads, synsel::CodeEmbeddings<T> codes,
                            std::mt19937_64& rng)
    : encoder_(text::Encoder<T>::create(encoder, this->params_, rng)),
      head_(MsamHead<T>::create({encoder.hidden, heads, codes.codes()}, this->params_, rng)),
      codes_(std::move(codes)),
      overlap_(overlap) {}

template <typename T>
CeMsamModel<T>::CeMsamModel(const text::EncoderConfig& encoder, std::int64_t overlap,
                            std::int64_t heads, synsel::CodeEmbeddings<T> codes,
                            ParameterSet<T> params)
    : Classifier<T>(std::move(params)),
      encoder_(text::Encoder<T>::attach(encoder, this->params_)),
      head_(MsamHead<T>::attach({encoder.hidden, heads, codes.codes()}, this->params_)),
      codes_(std::move(codes)),
      overlap_(overlap) {}

template <typename T>
Var CeMsamModel<T>::chunk_logit_matrix(ParamBinding<T>& bind,
                                       std::span<const text::Chunk> chunks) const {
  if (chunks.empty()) throw Error("ce-msam: document produced no chunks");
  const auto prep = head_.prepare(bind, codes_);
  std::vector<Var> rows;
  rows.reserve(chunks.size());
  for (const auto& chunk : chunks) {
    const Var reps = encoder_.encode_chunk(bind, chunk);
    rows.push_back(head_.chunk_logits(bind, prep, reps, chunk.mask));
  }
  return rows.size() == 1 ? rows[0] : bind.graph().concat_rows(rows);
}

template <typename T>
Var CeMsamModel<T>::forward_chunks(ParamBinding<T>& bind,
                                   std::span<const text::Chunk> chunks) const {
  return bind.graph().max_rows(chunk_logit_matrix(bind, chunks));
}

template <typename T>
Var CeMsamModel<T>::forward(ParamBinding<T>& bind, const text::Document& doc) const {
  const auto chunks =
      text::chunk_document(doc.tokens, encoder_.config().max_len, overlap_);
  return forward_chunks(bind, chunks);
}

template <typename T>
BmModel<T>::BmModel(const text::EncoderConfig& encoder, int codes, std::mt19937_64& rng)
    : encoder_(text::Encoder<T>::create(encoder, this->params_, rng)), codes_(codes) {
  weight_ = this->params_.add("bm.weight", diff::glorot_uniform<T>(codes, encoder.hidden, rng));
  bias_ = this->params_.add("bm.bias", Tensor<T>::matrix(1, codes));
}

template <typename T>
BmModel<T>::BmModel(const text::EncoderConfig& encoder, int codes, ParameterSet<T> params)
    : Classifier<T>(std::move(params)),
      encoder_(text::Encoder<T>::attach(encoder, this->params_)),
      codes_(codes) {
  weight_ = this->params_.index_of("bm.weight");
  bias_ = this->params_.index_of("bm.bias");
  if (this->params_[weight_].rows() != codes || this->params_[weight_].cols() != encoder.hidden) {
    throw DimensionError("bm.weight does not match L x H");
  }
}

template <typename T>
Var BmModel<T>::forward(ParamBinding<T>& bind, const text::Document& doc) const {
  const auto limit = static_cast<std::size_t>(encoder_.config().max_len - 2);
  const std::span<const text::TokenId> head(doc.tokens.data(),
                                            std::min(doc.tokens.size(), limit));
  auto& g = bind.graph();
  const Var cls = encoder_.encode_text_cls(bind, head);
  return g.add_row(g.matmul_nt(cls, bind(weight_)), bind(bias_));
}

template class CeMsamModel<float>;
template class CeMsamModel<double>;
template class BmModel<float>;
template class BmModel<double>;

}  // namespace msam::model
