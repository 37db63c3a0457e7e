// Copyright 2026 The MSAM Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "msam/synsel/codebook.hpp"
#include "msam/text/document.hpp"

namespace msam::harness {

enum class Placement { kUniform, kLateOnly };

struct CorpusSpec {
  int train_docs = 2000;
  int valid_docs = 300;
  int test_docs = 300;
  int min_length = 200;
  int max_length = 1200;
  int codes = 20;
  int min_synonyms = 2;
  int max_synonyms = 6;
  int min_phrase_words = 1;
  int max_phrase_words = 3;
  double prevalence_exponent = 1.0;  // code of rank r appears with prob top_prevalence * r^-s
  double top_prevalence = 0.4;
  Placement placement = Placement::kUniform;
  int late_start = 512;  // first admissible mention position under kLateOnly
  int noise_vocab = 2000;
  // Adds near-duplicate variants (first synonym plus filler words) per code.
  int near_duplicates = 0;
  int filler_words = 12;
  std::uint64_t seed = 7;

  // Throws when a document cannot hold its mentions under the policy.
  void validate() const;
};

CorpusSpec parse_corpus_spec(const std::string& text, const std::string& origin = "<spec>");
CorpusSpec load_corpus_spec(const std::filesystem::path& path);

// Mention span inside a generated document.
struct Mention {
  int code = 0;
  std::size_t begin = 0;
  std::size_t length = 0;
};

struct GeneratedDoc {
  text::RawDocument doc;
  std::vector<Mention> mentions;
};

struct Corpus {
  std::vector<GeneratedDoc> train, valid, test;
  std::vector<synsel::CodebookEntry> codebook;
  std::vector<double> prevalence;  // sampling probability per code
  text::Vocabulary vocab;          // every word that can occur
};

std::string code_name(int index);

Corpus generate_corpus(const CorpusSpec& spec);

// Writes train/valid/test.jsonl, codebook.jsonl and vocab.txt into `dir`.
void write_corpus(const Corpus& corpus, const std::filesystem::path& dir);

}  // namespace msam::harness
