// Copyright 2026 The MSAM Authors.
// SPDX-License-Identifier: Apache-2.0

#include "msam/text/document.hpp"

#include <algorithm>
#include <fstream>
#include <json.hpp>

#include "msam/error.hpp"

namespace msam::text {

using nlohmann::json;

void Document::validate(int num_codes) const {
  for (auto t : tokens) {
    if (t == kPad || t == kCls || t == kSep) {
      throw FormatError("document '" + id + "' contains a reserved token id");
    }
  }
  for (auto c : gold_codes) {
    if (c < 0 || c >= num_codes) {
      throw FormatError("document '" + id + "' has code index " + std::to_string(c) +
                        " outside [0, " + std::to_string(num_codes) + ")");
    }
  }
}

std::vector<float> Document::label_vector(int num_codes) const {
  std::vector<float> y(static_cast<std::size_t>(num_codes), 0.0f);
  for (auto c : gold_codes) y.at(static_cast<std::size_t>(c)) = 1.0f;
  return y;
}

std::vector<RawDocument> read_raw_corpus(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot read corpus '" + path.string() + "'");
  std::vector<RawDocument> docs;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      const auto j = json::parse(line);
      RawDocument d;
      d.id = j.at("id").get<std::string>();
      d.tokens = j.at("tokens").get<std::vector<std::string>>();
      d.codes = j.at("codes").get<std::vector<std::string>>();
      docs.push_back(std::move(d));
    } catch (const json::exception& e) {
      throw FormatError(path.string() + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
  return docs;
}

void write_raw_corpus(const std::filesystem::path& path, const std::vector<RawDocument>& docs) {
  std::ofstream out(path);
  if (!out) throw FormatError("cannot write corpus '" + path.string() + "'");
  for (const auto& d : docs) {
    out << json{{"id", d.id}, {"tokens", d.tokens}, {"codes", d.codes}}.dump() << '\n';
  }
}

std::vector<Document> to_documents(const std::vector<RawDocument>& raw, const Vocabulary& vocab,
                                   const std::unordered_map<std::string, int>& code_index) {
  std::vector<Document> docs;
  docs.reserve(raw.size());
  for (const auto& r : raw) {
    Document d;
    d.id = r.id;
    d.tokens.reserve(r.tokens.size());
    for (const auto& t : r.tokens) d.tokens.push_back(vocab.id(to_lower(t)));
    for (const auto& c : r.codes) {
      auto it = code_index.find(c);
      if (it == code_index.end()) {
        throw FormatError("document '" + r.id + "' references unknown code '" + c + "'");
      }
      d.gold_codes.push_back(it->second);
    }
    std::sort(d.gold_codes.begin(), d.gold_codes.end());
    d.gold_codes.erase(std::unique(d.gold_codes.begin(), d.gold_codes.end()), d.gold_codes.end());
    docs.push_back(std::move(d));
  }
  return docs;
}

}  // namespace msam::text
