// Copyright 2026 The MSAM Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include "msam/model/classifier.hpp"
#include "msam/synsel/codebook.hpp"

namespace msam::model {

struct MsamConfig {
  std::int64_t hidden = 64;  // H
  std::int64_t heads = 4;    // Z, equal to the synonyms per code M
  int codes = 0;             // L
};

// Splits T x H token representations into Z column blocks of width H / Z.
std::vector<Var> split_heads(Graph<float>& g, Var k, std::int64_t heads);
std::vector<Var> split_heads(Graph<double>& g, Var k, std::int64_t heads);

// Multi-synonym attention head. Synonym z of every code queries head z:
//   alpha_{l,z} = softmax_T( (W_Q q_{l,z})^T tanh(W_K K_z) )
//   r_{l,z}     = tanh(K_z)^T alpha_{l,z}
//   r_l         = [r_{l,1}; ...; r_{l,Z}]          (H-vector)
//   logit_l     = r_l^T W v_l
// W_Q is (H/Z) x H, W_K is (H/Z) x (H/Z) shared by all heads, W is H x H.
template <typename T>
class MsamHead {
 public:
  static MsamHead create(const MsamConfig& config, ParameterSet<T>& params, std::mt19937_64& rng);
  static MsamHead attach(const MsamConfig& config, const ParameterSet<T>& params);

  const MsamConfig& config() const { return config_; }

  // Per-document quantities that do not depend on the chunk.
  struct Prepared {
    std::vector<Var> queries;  // Z entries, each L x (H/Z): rows W_Q q_{l,z}
    Var code_proj;             // L x H: rows (W v_l)^T
  };
  Prepared prepare(ParamBinding<T>& bind, const synsel::CodeEmbeddings<T>& codes) const;

  // Z attention maps, each L x T. Masked positions receive ~0 weight.
  std::vector<Var> attend(ParamBinding<T>& bind, const Prepared& prep, std::span<const Var> heads,
                          std::span<const std::uint8_t> mask) const;
  // L x H matrix whose row l is r_l.
  Var code_text_repr(Graph<T>& g, std::span<const Var> heads, std::span<const Var> alphas) const;
  // 1 x L bi-affine logits.
  Var score(Graph<T>& g, Var reps, const Prepared& prep) const;

  // 1 x L logits of one encoded chunk (T x H).
  Var chunk_logits(ParamBinding<T>& bind, const Prepared& prep, Var chunk_reps,
                   std::span<const std::uint8_t> mask) const;

  std::size_t query_proj_index() const { return wq_; }
  std::size_t key_proj_index() const { return wk_; }
  std::size_t biaffine_index() const { return w_; }

 private:
  MsamHead(const MsamConfig& config, const ParameterSet<T>& params);

  MsamConfig config_;
  std::size_t wq_ = 0, wk_ = 0, w_ = 0;
};

extern template class MsamHead<float>;
extern template class MsamHead<double>;

}  // namespace msam::model
