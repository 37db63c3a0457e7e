// Copyright 2026 The MSAM Authors.
// SPDX-License-Identifier: Apache-2.0

#include "msam/synsel/codebook.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cctype>
#include <fstream>
#include <json.hpp>
#include <cmath>
#include <numeric>

#include "msam/error.hpp"

namespace msam::synsel {

using nlohmann::json;

namespace {

std::string join(const std::vector<std::string>& words) {
  std::string out;
  for (const auto& w : words) {
    if (!out.empty()) out += ' ';
    out += w;
  }
  return out;
}

bool kept_character(char c) {
  const auto u = static_cast<unsigned char>(c);
  // Non-ASCII bytes are kept so accented letters survive.
  return std::isalnum(u) || u >= 0x80 || c == '-' || c == '(' || c == ')' || c == '[' ||
         c == ']';
}

}  // namespace

std::vector<std::string> normalize_variants(std::string_view raw) {
  std::vector<std::string> out;
  auto push = [&out](std::string s) {
    if (!s.empty() && std::find(out.begin(), out.end(), s) == out.end()) {
      out.push_back(std::move(s));
    }
  };
  push(join(text::split_whitespace(raw)));

  std::string cleaned(raw);
  for (auto& c : cleaned) {
    if (!kept_character(c)) c = ' ';
  }
  std::vector<std::string> words;
  for (auto& w : text::split_whitespace(cleaned)) {
    const auto lower = text::to_lower(w);
    if (lower == "or" || lower == "and") continue;
    words.push_back(std::move(w));
  }
  push(join(words));
  return out;
}

std::vector<CodebookEntry> read_codebook(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot read codebook '" + path.string() + "'");
  std::vector<CodebookEntry> entries;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      const auto j = json::parse(line);
      entries.push_back({j.at("code").get<std::string>(),
                         j.at("synonyms").get<std::vector<std::string>>()});
    } catch (const json::exception& e) {
      throw FormatError(path.string() + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
  return entries;
}

void write_codebook(const std::filesystem::path& path, const std::vector<CodebookEntry>& entries) {
  std::ofstream out(path);
  if (!out) throw FormatError("cannot write codebook '" + path.string() + "'");
  for (const auto& e : entries) {
    out << json{{"code", e.code}, {"synonyms", e.synonyms}}.dump() << '\n';
  }
}

std::vector<SynonymRecord> normalize_codebook(const std::vector<CodebookEntry>& entries) {
  std::vector<SynonymRecord> records;
  records.reserve(entries.size());
  for (const auto& e : entries) {
    SynonymRecord r{e.code, {}};
    for (const auto& s : e.synonyms) {
      for (auto& v : normalize_variants(s)) {
        if (std::find(r.variants.begin(), r.variants.end(), v) == r.variants.end()) {
          r.variants.push_back(std::move(v));
        }
      }
    }
    records.push_back(std::move(r));
  }
  return records;
}

std::unordered_map<std::string, int> code_index(const std::vector<SynonymRecord>& records) {
  std::unordered_map<std::string, int> index;
  for (std::size_t i = 0; i < records.size(); ++i) {
    if (!index.emplace(records[i].code, static_cast<int>(i)).second) {
      throw FormatError("duplicate code '" + records[i].code + "' in codebook");
    }
  }
  return index;
}

template <typename T>
void CodeEmbeddings<T>::recompute_pooled() {
  if (queries.empty()) throw Error("code embeddings: no codes");
  const auto h = queries[0].cols();
  pooled = diff::Tensor<T>::matrix(static_cast<std::int64_t>(queries.size()), h);
  for (std::size_t l = 0; l < queries.size(); ++l) {
    const auto& q = queries[l];
    for (std::int64_t c = 0; c < h; ++c) {
      T s = 0;
      for (std::int64_t r = 0; r < q.rows(); ++r) s += q.at(r, c);
      pooled.at(static_cast<std::int64_t>(l), c) = s / static_cast<T>(q.rows());
    }
  }
}

template <typename T>
void CodeEmbeddings<T>::center() {
  if (queries.empty()) throw Error("code embeddings: no codes");
  const auto h = queries[0].cols();
  std::vector<double> mean(static_cast<std::size_t>(h), 0.0);
  std::int64_t rows = 0;
  for (const auto& q : queries) {
    for (std::int64_t r = 0; r < q.rows(); ++r, ++rows) {
      for (std::int64_t c = 0; c < h; ++c) mean[static_cast<std::size_t>(c)] += q.at(r, c);
    }
  }
  for (double& m : mean) m /= static_cast<double>(rows);
  for (auto& q : queries) {
    for (std::int64_t r = 0; r < q.rows(); ++r) {
      double ss = 0.0;
      for (std::int64_t c = 0; c < h; ++c) {
        const double v = q.at(r, c) - mean[static_cast<std::size_t>(c)];
        q.at(r, c) = static_cast<T>(v);
        ss += v * v;
      }
      const double rms = std::sqrt(ss / static_cast<double>(h));
      // A row equal to the mean (e.g. a single code) stays at zero.
      if (rms > 1e-12) {
        for (std::int64_t c = 0; c < h; ++c) q.at(r, c) = static_cast<T>(q.at(r, c) / rms);
      }
    }
  }
  recompute_pooled();
}

template <typename T>
std::vector<diff::Tensor<T>> CodeEmbeddings<T>::tensors() const {
  std::vector<diff::Tensor<T>> out = queries;
  out.push_back(pooled);
  return out;
}

template <typename T>
CodeEmbeddings<T> build_code_embeddings(const std::vector<SynonymRecord>& records,
                                        const text::Encoder<T>& encoder,
                                        const diff::ParameterSet<T>& params,
                                        const text::Vocabulary& vocab, int m, SelectionMode mode,
                                        std::mt19937_64& rng) {
  if (m < 1) throw Error("synonyms per code must be at least 1");
  if (records.empty()) throw Error("codebook is empty");
  CodeEmbeddings<T> out;
  const auto h = encoder.config().hidden;
  for (const auto& rec : records) {
    if (rec.variants.empty()) throw Error("code '" + rec.code + "' has no synonyms");
    const auto n = rec.variants.size();
    diff::Tensor<T> cls = diff::Tensor<T>::matrix(static_cast<std::int64_t>(n), h);
    for (std::size_t i = 0; i < n; ++i) {
      const auto tokens = text::tokenize(rec.variants[i], vocab);
      const auto v = encoder.cls_vector(params, tokens);
      std::copy(v.data().begin(), v.data().end(), cls.row_span(static_cast<std::int64_t>(i)).begin());
    }

    CodeSelection sel{rec.code, {}, 0.0, mode};
    std::vector<int> rows;
    if (n <= static_cast<std::size_t>(m)) {
      for (std::size_t i = 0; i < static_cast<std::size_t>(m); ++i) rows.push_back(static_cast<int>(i % n));
      if (n > 1) {
        std::vector<int> all(n);
        std::iota(all.begin(), all.end(), 0);
        sel.objective = diversity_objective(cosine_distance_matrix(cls.template cast<double>()), all);
      }
    } else {
      const auto d = cosine_distance_matrix(cls.template cast<double>());
      Selection s;
      switch (mode) {
        case SelectionMode::kExact:
          if (n <= kExactLimit) {
            s = select_exact(d, m);
          } else {
            s = select_greedy(d, m);
            sel.mode = SelectionMode::kGreedy;
          }
          break;
        case SelectionMode::kGreedy: s = select_greedy(d, m); break;
        case SelectionMode::kRandom: s = select_random(n, m, rng); break;
      }
      rows = s.indices();
      if (static_cast<int>(rows.size()) != m) {
        throw Error(fmt::format("selection for '{}' returned {} of {} synonyms", rec.code,
                                rows.size(), m));
      }
      sel.objective = diversity_objective(d, rows);
    }

    diff::Tensor<T> q = diff::Tensor<T>::matrix(m, h);
    for (int r = 0; r < m; ++r) {
      const auto src = cls.row_span(rows[static_cast<std::size_t>(r)]);
      std::copy(src.begin(), src.end(), q.row_span(r).begin());
      sel.selected.push_back(rec.variants[static_cast<std::size_t>(rows[static_cast<std::size_t>(r)])]);
    }
    out.queries.push_back(std::move(q));
    out.selections.push_back(std::move(sel));
  }
  out.recompute_pooled();
  return out;
}

template <typename T>
void write_selection_report(const std::filesystem::path& path, const CodeEmbeddings<T>& codes) {
  json report = json::object();
  for (const auto& s : codes.selections) {
    report[s.code] = {{"selected", s.selected}, {"objective", s.objective}, {"mode", to_string(s.mode)}};
  }
  std::ofstream out(path);
  if (!out) throw FormatError("cannot write selection report '" + path.string() + "'");
  out << report.dump(2) << '\n';
}

template struct CodeEmbeddings<float>;
template struct CodeEmbeddings<double>;
template CodeEmbeddings<float> build_code_embeddings<float>(
    const std::vector<SynonymRecord>&, const text::Encoder<float>&,
    const diff::ParameterSet<float>&, const text::Vocabulary&, int, SelectionMode,
    std::mt19937_64&);
template CodeEmbeddings<double> build_code_embeddings<double>(
    const std::vector<SynonymRecord>&, const text::Encoder<double>&,
    const diff::ParameterSet<double>&, const text::Vocabulary&, int, SelectionMode,
    std::mt19937_64&);
template void write_selection_report<float>(const std::filesystem::path&,
                                            const CodeEmbeddings<float>&);
template void write_selection_report<double>(const std::filesystem::path&,
                                             const CodeEmbeddings<double>&);

}  // namespace msam::synsel
