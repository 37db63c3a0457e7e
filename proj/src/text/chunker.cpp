// Copyright 2026 The MSAM Authors.
// SPDX-License-Identifier: Apache-2.0

#include "msam/text/chunker.hpp"

#include <algorithm>

#include "msam/error.hpp"

namespace msam::text {

namespace {

void check_geometry(std::int64_t chunk_len, std::int64_t overlap) {
  if (chunk_len < 2) throw Error("chunk length must be at least 2");
  if (overlap < 0 || overlap >= chunk_len - 1) {
    throw Error("overlap must lie in [0, chunk_len - 1)");
  }
}

}  // namespace

std::int64_t chunk_count(std::int64_t n, std::int64_t chunk_len, std::int64_t overlap) {
  check_geometry(chunk_len, overlap);
  if (n <= 0) throw Error("cannot chunk an empty token sequence");
  const std::int64_t capacity = chunk_len - 1;
  const std::int64_t stride = capacity - overlap;
  if (n <= capacity) return 1;
  return 1 + (n - capacity + stride - 1) / stride;
}

std::vector<Chunk> chunk_document(std::span<const TokenId> tokens, std::int64_t chunk_len,
                                  std::int64_t overlap) {
  const auto n = static_cast<std::int64_t>(tokens.size());
  const std::int64_t count = chunk_count(n, chunk_len, overlap);
  const std::int64_t capacity = chunk_len - 1;
  const std::int64_t stride = capacity - overlap;

  std::vector<Chunk> chunks;
  chunks.reserve(static_cast<std::size_t>(count));
  for (std::int64_t c = 0; c < count; ++c) {
    const std::int64_t begin = c * stride;
    const std::int64_t end = std::min(begin + capacity, n);
    Chunk chunk;
    chunk.index = static_cast<int>(c);
    chunk.ids.assign(static_cast<std::size_t>(chunk_len), kPad);
    chunk.mask.assign(static_cast<std::size_t>(chunk_len), 0);
    std::copy(tokens.begin() + begin, tokens.begin() + end, chunk.ids.begin());
    const auto content = static_cast<std::size_t>(end - begin);
    chunk.ids[content] = kSep;
    std::fill_n(chunk.mask.begin(), content + 1, std::uint8_t{1});
    chunks.push_back(std::move(chunk));
  }
  return chunks;
}

}  // namespace msam::text
