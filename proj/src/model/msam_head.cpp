// Copyright 2026 The MSAM Authors.
// SPDX-License-Identifier: Apache-2.0

#include "msam/model/msam_head.hpp"

#include <fmt/format.h>

#include "msam/error.hpp"

namespace msam::model {

namespace {

template <typename T>
std::vector<Var> split_heads_impl(Graph<T>& g, Var k, std::int64_t heads) {
  const auto h = g.value(k).cols();
  if (heads <= 0 || h % heads != 0) {
    throw DimensionError(fmt::format("split_heads: H = {} is not divisible by Z = {}", h, heads));
  }
  const auto width = h / heads;
  if (heads == 1) return {k};
  std::vector<Var> out;
  out.reserve(static_cast<std::size_t>(heads));
  for (std::int64_t z = 0; z < heads; ++z) out.push_back(g.slice_cols(k, z * width, (z + 1) * width));
  return out;
}

}  // namespace

std::vector<Var> split_heads(Graph<float>& g, Var k, std::int64_t heads) {
  return split_heads_impl(g, k, heads);
}
std::vector<Var> split_heads(Graph<double>& g, Var k, std::int64_t heads) {
  return split_heads_impl(g, k, heads);
}

template <typename T>
MsamHead<T>::MsamHead(const MsamConfig& config, const ParameterSet<T>& params) : config_(config) {
  if (config_.heads <= 0 || config_.hidden % config_.heads != 0) {
    throw DimensionError(fmt::format("msam: H = {} is not divisible by Z = {}", config_.hidden,
                                     config_.heads));
  }
  const auto d = config_.hidden / config_.heads;
  auto lookup = [&](const char* name, std::int64_t rows, std::int64_t cols) {
    const auto i = params.index_of(name);
    if (params[i].rows() != rows || params[i].cols() != cols) {
      throw DimensionError(fmt::format("parameter '{}' is {}, expected ({}x{})", name,
                                       diff::format_dims(params[i].dims()), rows, cols));
    }
    return i;
  };
  wq_ = lookup("msam.w_q", d, config_.hidden);
  wk_ = lookup("msam.w_k", d, d);
  w_ = lookup("msam.w", config_.hidden, config_.hidden);
}

template <typename T>
MsamHead<T> MsamHead<T>::create(const MsamConfig& config, ParameterSet<T>& params,
                                std::mt19937_64& rng) {
  if (config.heads <= 0 || config.hidden % config.heads != 0) {
    throw DimensionError(fmt::format("msam: H = {} is not divisible by Z = {}", config.hidden,
                                     config.heads));
  }
  const auto d = config.hidden / config.heads;
  params.add("msam.w_q", diff::glorot_uniform<T>(d, config.hidden, rng));
  params.add("msam.w_k", diff::glorot_uniform<T>(d, d, rng));
  params.add("msam.w", diff::glorot_uniform<T>(config.hidden, config.hidden, rng));
  return MsamHead(config, params);
}

template <typename T>
MsamHead<T> MsamHead<T>::attach(const MsamConfig& config, const ParameterSet<T>& params) {
  return MsamHead(config, params);
}

template <typename T>
typename MsamHead<T>::Prepared MsamHead<T>::prepare(
    ParamBinding<T>& bind, const synsel::CodeEmbeddings<T>& codes) const {
  if (codes.codes() != config_.codes || codes.hidden() != config_.hidden) {
    throw DimensionError(fmt::format("msam: code embeddings {}x{} for head with L={} H={}",
                                     codes.codes(), codes.hidden(), config_.codes, config_.hidden));
  }
  if (codes.synonyms() != config_.heads) {
    throw DimensionError(fmt::format("msam: {} synonyms per code but Z = {}", codes.synonyms(),
                                     config_.heads));
  }
  auto& g = bind.graph();
  const auto L = static_cast<std::int64_t>(config_.codes);
  const auto H = config_.hidden;
  Prepared prep;
  for (std::int64_t z = 0; z < config_.heads; ++z) {
    Tensor<T> raw = Tensor<T>::matrix(L, H);
    for (std::int64_t l = 0; l < L; ++l) {
      const auto src = codes.queries[static_cast<std::size_t>(l)].row_span(z);
      std::copy(src.begin(), src.end(), raw.row_span(l).begin());
    }
    prep.queries.push_back(g.matmul_nt(g.constant(std::move(raw)), bind(wq_)));
  }
  prep.code_proj = g.matmul_nt(g.constant(codes.pooled), bind(w_));
  return prep;
}

template <typename T>
std::vector<Var> MsamHead<T>::attend(ParamBinding<T>& bind, const Prepared& prep,
                                     std::span<const Var> heads,
                                     std::span<const std::uint8_t> mask) const {
  if (static_cast<std::int64_t>(heads.size()) != config_.heads ||
      prep.queries.size() != heads.size()) {
    throw DimensionError("msam: head count does not match Z");
  }
  auto& g = bind.graph();
  std::vector<Var> alphas;
  alphas.reserve(heads.size());
  for (std::size_t z = 0; z < heads.size(); ++z) {
    const Var keys = g.tanh(g.matmul_nt(heads[z], bind(wk_)));
    alphas.push_back(g.softmax_rows(g.matmul_nt(prep.queries[z], keys), mask));
  }
  return alphas;
}

template <typename T>
Var MsamHead<T>::code_text_repr(Graph<T>& g, std::span<const Var> heads,
                                std::span<const Var> alphas) const {
  if (heads.size() != alphas.size()) throw DimensionError("msam: heads vs attention maps");
  std::vector<Var> parts;
  parts.reserve(heads.size());
  for (std::size_t z = 0; z < heads.size(); ++z) {
    parts.push_back(g.matmul(alphas[z], g.tanh(heads[z])));
  }
  return parts.size() == 1 ? parts[0] : g.concat_cols(parts);
}

template <typename T>
Var MsamHead<T>::score(Graph<T>& g, Var reps, const Prepared& prep) const {
  return g.row_dot(reps, prep.code_proj);
}

template <typename T>
Var MsamHead<T>::chunk_logits(ParamBinding<T>& bind, const Prepared& prep, Var chunk_reps,
                              std::span<const std::uint8_t> mask) const {
  auto& g = bind.graph();
  const auto heads = split_heads(g, chunk_reps, config_.heads);
  const auto alphas = attend(bind, prep, heads, mask);
  return score(g, code_text_repr(g, heads, alphas), prep);
}

template class MsamHead<float>;
template class MsamHead<double>;

}  // namespace msam::model
