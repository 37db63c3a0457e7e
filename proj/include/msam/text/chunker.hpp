// Copyright 2026 The MSAM Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "msam/text/vocab.hpp"

namespace msam::text {

// Fixed-length window: up to T-1 content tokens, then SEP, then PAD.
struct Chunk {
  std::vector<TokenId> ids;
  std::vector<std::uint8_t> mask;  // 1 for content and SEP, 0 for PAD
  int index = 0;

  std::size_t length() const { return ids.size(); }
};

// Number of chunks for a document of n tokens.
std::int64_t chunk_count(std::int64_t n, std::int64_t chunk_len, std::int64_t overlap);

// Overlapping segmentation. Content capacity is chunk_len - 1 and the window
// advances by (chunk_len - 1) - overlap, so neighbours share `overlap`
// content tokens.
std::vector<Chunk> chunk_document(std::span<const TokenId> tokens, std::int64_t chunk_len,
                                  std::int64_t overlap);

}  // namespace msam::text
