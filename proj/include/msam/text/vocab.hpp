// Copyright 2026 The MSAM Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace msam::text {

using TokenId = std::int32_t;

inline constexpr TokenId kPad = 0;
inline constexpr TokenId kCls = 1;
inline constexpr TokenId kSep = 2;
inline constexpr TokenId kUnk = 3;
inline constexpr TokenId kFirstWord = 4;

// Token <-> id table. Ids are contiguous; the first four are reserved.
class Vocabulary {
 public:
  Vocabulary();

  // Returns the id of `token`, inserting it when new.
  TokenId add(std::string_view token);
  // UNK for unknown tokens.
  TokenId id(std::string_view token) const;
  bool contains(std::string_view token) const;
  const std::string& token(TokenId id) const;
  std::size_t size() const { return tokens_.size(); }

  // One token per line, line number = id.
  void save(const std::filesystem::path& path) const;
  static Vocabulary load(const std::filesystem::path& path);

 private:
  std::vector<std::string> tokens_;
  std::unordered_map<std::string, TokenId> ids_;
};

// Lowercases and splits on whitespace; unknown words map to UNK.
std::vector<TokenId> tokenize(std::string_view text, const Vocabulary& vocab);

std::string to_lower(std::string_view s);
std::vector<std::string> split_whitespace(std::string_view text);

}  // namespace msam::text
