// Copyright 2026 The MSAM Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <unordered_map>
#include <vector>

#include "msam/text/vocab.hpp"

namespace msam::text {

// A tokenized document with its gold code indices in [0, L).
struct Document {
  std::string id;
  std::vector<TokenId> tokens;
  std::vector<int> gold_codes;  // sorted, unique

  // Throws if tokens contain PAD/CLS/SEP or codes fall outside [0, num_codes).
  void validate(int num_codes) const;
  std::vector<float> label_vector(int num_codes) const;
};

// Corpus line as stored on disk: {"id", "tokens": [...], "codes": [...]}.
struct RawDocument {
  std::string id;
  std::vector<std::string> tokens;
  std::vector<std::string> codes;
};

std::vector<RawDocument> read_raw_corpus(const std::filesystem::path& path);
void write_raw_corpus(const std::filesystem::path& path, const std::vector<RawDocument>& docs);

// Maps raw tokens through `vocab` (lowercased, UNK when absent) and codes
// through `code_index`; unknown codes are an error.
std::vector<Document> to_documents(const std::vector<RawDocument>& raw, const Vocabulary& vocab,
                                   const std::unordered_map<std::string, int>& code_index);

}  // namespace msam::text
