// Copyright 2026 The MSAM Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <random>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "msam/synsel/diversity.hpp"
#include "msam/text/encoder.hpp"
#include "msam/text/vocab.hpp"

namespace msam::synsel {

// Returns `raw` with collapsed whitespace plus a cleaned variant: characters
// other than letters, digits, hyphens and brackets become spaces and the
// standalone words "or"/"and" are dropped. Duplicates and empties removed.
std::vector<std::string> normalize_variants(std::string_view raw);

// One code and its synonym variants after normalization.
struct SynonymRecord {
  std::string code;
  std::vector<std::string> variants;
};

// Codebook line: {"code": string, "synonyms": [string...]}.
struct CodebookEntry {
  std::string code;
  std::vector<std::string> synonyms;
};

std::vector<CodebookEntry> read_codebook(const std::filesystem::path& path);
void write_codebook(const std::filesystem::path& path, const std::vector<CodebookEntry>& entries);

// Normalizes every synonym and merges the variants, keeping first-seen order.
std::vector<SynonymRecord> normalize_codebook(const std::vector<CodebookEntry>& entries);

std::unordered_map<std::string, int> code_index(const std::vector<SynonymRecord>& records);

// Per-code outcome of synonym selection.
struct CodeSelection {
  std::string code;
  std::vector<std::string> selected;  // M rows, cycled when fewer variants exist
  double objective = 0.0;
  SelectionMode mode = SelectionMode::kExact;
};

// Frozen label-side inputs of the attention head: Q_l (M x H) per code and
// V (L x H) whose row l is the mean of Q_l's rows.
template <typename T>
struct CodeEmbeddings {
  std::vector<diff::Tensor<T>> queries;  // L tensors of M x H
  diff::Tensor<T> pooled;                // L x H
  std::vector<CodeSelection> selections;

  int codes() const { return static_cast<int>(queries.size()); }
  int synonyms() const { return queries.empty() ? 0 : static_cast<int>(queries[0].rows()); }
  std::int64_t hidden() const { return pooled.cols(); }

  // Rebuilds `pooled` from `queries`.
  void recompute_pooled();
  // Subtracts the mean over every query row, rescales each row to unit RMS
  // and rebuilds `pooled`.
  void center();
  std::vector<diff::Tensor<T>> tensors() const;
};

// Embeds every variant with the encoder's CLS vector, picks M per code with
// the requested mode (exact falls back to greedy beyond kExactLimit) and
// cycles variants when a code has fewer than M.
template <typename T>
CodeEmbeddings<T> build_code_embeddings(const std::vector<SynonymRecord>& records,
                                        const text::Encoder<T>& encoder,
                                        const diff::ParameterSet<T>& params,
                                        const text::Vocabulary& vocab, int m, SelectionMode mode,
                                        std::mt19937_64& rng);

// {code: {selected: [...], objective: x, mode: "exact"|"greedy"|"random"}}.
template <typename T>
void write_selection_report(const std::filesystem::path& path, const CodeEmbeddings<T>& codes);

extern template struct CodeEmbeddings<float>;
extern template struct CodeEmbeddings<double>;

}  // namespace msam::synsel
