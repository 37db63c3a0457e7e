// Copyright 2026 The MSAM Authors.
// SPDX-License-Identifier: Apache-2.0

#include "msam/harness/corpus.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <random>
#include <sstream>

#include "msam/error.hpp"
#include "msam/harness/config.hpp"

namespace msam::harness {

namespace {

constexpr std::string_view kConsonants = "bcdfghjklmnprstvwz";
constexpr std::string_view kVowels = "aeiou";
constexpr std::size_t kSyllables = kConsonants.size() * kVowels.size();
constexpr std::size_t kWordCapacity = kSyllables * kSyllables * kSyllables;

std::string word_from_index(std::size_t index) {
  std::string w;
  for (int k = 0; k < 3; ++k) {
    const std::size_t syl = index % kSyllables;
    index /= kSyllables;
    w += kConsonants[syl / kVowels.size()];
    w += kVowels[syl % kVowels.size()];
  }
  return w;
}

// `count` distinct three-syllable words in a seeded order.
std::vector<std::string> draw_words(std::size_t count, std::mt19937_64& rng) {
  std::vector<std::uint32_t> pool(kWordCapacity);
  std::iota(pool.begin(), pool.end(), 0u);
  std::vector<std::string> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    std::uniform_int_distribution<std::size_t> pick(i, pool.size() - 1);
    std::swap(pool[i], pool[pick(rng)]);
    out.push_back(word_from_index(pool[i]));
  }
  return out;
}

std::string join(const std::vector<std::string>& words) {
  std::string s;
  for (const auto& w : words) {
    if (!s.empty()) s += ' ';
    s += w;
  }
  return s;
}

Placement parse_placement(const std::string& v) {
  if (v == "uniform") return Placement::kUniform;
  if (v == "late-only") return Placement::kLateOnly;
  throw Error(fmt::format("unknown placement '{}' (uniform or late-only)", v));
}

template <typename V>
V number(const std::string& key, const std::string& value, const std::string& origin) {
  std::istringstream in(value);
  V out{};
  in >> out;
  if (in.fail() || !in.eof()) {
    throw FormatError(fmt::format("{}: key '{}' has invalid value '{}'", origin, key, value));
  }
  return out;
}

}  // namespace

std::string code_name(int index) { return fmt::format("C{:02d}", index); }

void CorpusSpec::validate() const {
  auto require = [](bool ok, const std::string& what) {
    if (!ok) throw Error("invalid corpus spec: " + what);
  };
  require(train_docs >= 1 && valid_docs >= 1 && test_docs >= 1, "every split needs documents");
  require(min_length >= 1 && max_length >= min_length, "lengths must satisfy 1 <= min <= max");
  require(codes >= 1, "codes must be >= 1");
  require(min_synonyms >= 1 && max_synonyms >= min_synonyms, "synonym counts must satisfy 1 <= min <= max");
  require(min_phrase_words >= 1 && max_phrase_words >= min_phrase_words,
          "phrase lengths must satisfy 1 <= min <= max");
  require(prevalence_exponent > 0.0, "prevalence exponent must be > 0");
  require(top_prevalence > 0.0 && top_prevalence <= 1.0, "top prevalence must lie in (0, 1]");
  require(noise_vocab >= 1, "noise vocabulary must be non-empty");
  require(near_duplicates >= 0 && filler_words >= 0, "near-duplicate counts must be >= 0");
  require(near_duplicates == 0 || filler_words >= 2, "near duplicates need at least 2 filler words");
  if (placement == Placement::kLateOnly) {
    require(late_start >= 0 && late_start < min_length,
            "late-only placement needs 0 <= late_start < min_length");
  }
  const auto code_words = static_cast<std::size_t>(codes) * static_cast<std::size_t>(max_synonyms) *
                          static_cast<std::size_t>(max_phrase_words);
  const auto needed = static_cast<std::size_t>(noise_vocab) + code_words +
                      static_cast<std::size_t>(filler_words);
  if (needed > kWordCapacity) {
    throw Error(fmt::format("invalid corpus spec: {} distinct words needed but only {} can be formed",
                            needed, kWordCapacity));
  }
}

CorpusSpec parse_corpus_spec(const std::string& text, const std::string& origin) {
  CorpusSpec s;
  for (const auto& [key, value] : parse_key_values(text, origin)) {
    auto i32 = [&] { return number<int>(key, value, origin); };
    if (key == "train_docs") s.train_docs = i32();
    else if (key == "valid_docs") s.valid_docs = i32();
    else if (key == "test_docs") s.test_docs = i32();
    else if (key == "min_length") s.min_length = i32();
    else if (key == "max_length") s.max_length = i32();
    else if (key == "codes") s.codes = i32();
    else if (key == "min_synonyms") s.min_synonyms = i32();
    else if (key == "max_synonyms") s.max_synonyms = i32();
    else if (key == "min_phrase_words") s.min_phrase_words = i32();
    else if (key == "max_phrase_words") s.max_phrase_words = i32();
    else if (key == "prevalence_exponent") s.prevalence_exponent = number<double>(key, value, origin);
    else if (key == "top_prevalence") s.top_prevalence = number<double>(key, value, origin);
    else if (key == "placement") s.placement = parse_placement(value);
    else if (key == "late_start") s.late_start = i32();
    else if (key == "noise_vocab") s.noise_vocab = i32();
    else if (key == "near_duplicates") s.near_duplicates = i32();
    else if (key == "filler_words") s.filler_words = i32();
    else if (key == "seed") s.seed = number<std::uint64_t>(key, value, origin);
    else throw FormatError(fmt::format("{}: unknown key '{}'", origin, key));
  }
  s.validate();
  return s;
}

CorpusSpec load_corpus_spec(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(fmt::format("cannot read corpus spec {}", path.string()));
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_corpus_spec(buf.str(), path.string());
}

Corpus generate_corpus(const CorpusSpec& spec) {
  spec.validate();
  std::mt19937_64 rng(spec.seed);
  auto uniform = [&](int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); };

  // Phrase shapes first so that one draw yields disjoint noise, filler and
  // code words.
  std::vector<std::vector<int>> shape(static_cast<std::size_t>(spec.codes));
  std::size_t code_words = 0;
  for (auto& s : shape) {
    s.resize(static_cast<std::size_t>(uniform(spec.min_synonyms, spec.max_synonyms)));
    for (int& len : s) {
      len = uniform(spec.min_phrase_words, spec.max_phrase_words);
      code_words += static_cast<std::size_t>(len);
    }
  }
  const auto n_noise = static_cast<std::size_t>(spec.noise_vocab);
  const auto n_filler = static_cast<std::size_t>(spec.filler_words);
  const auto words = draw_words(n_noise + n_filler + code_words, rng);
  const std::vector<std::string> noise(words.begin(), words.begin() + static_cast<std::ptrdiff_t>(n_noise));
  const std::vector<std::string> filler(words.begin() + static_cast<std::ptrdiff_t>(n_noise),
                                        words.begin() + static_cast<std::ptrdiff_t>(n_noise + n_filler));

  Corpus corpus;
  for (const auto& w : words) corpus.vocab.add(w);
  std::vector<std::vector<std::vector<std::string>>> phrases(shape.size());
  std::size_t next = n_noise + n_filler;
  for (std::size_t c = 0; c < shape.size(); ++c) {
    for (int len : shape[c]) {
      phrases[c].emplace_back(words.begin() + static_cast<std::ptrdiff_t>(next),
                              words.begin() + static_cast<std::ptrdiff_t>(next) + len);
      next += static_cast<std::size_t>(len);
    }
  }

  for (int c = 0; c < spec.codes; ++c) {
    synsel::CodebookEntry entry;
    entry.code = code_name(c);
    for (const auto& p : phrases[static_cast<std::size_t>(c)]) entry.synonyms.push_back(join(p));
    // Near duplicates: the first synonym padded with distinct filler pairs.
    for (int k = 0; k < spec.near_duplicates; ++k) {
      const auto a = static_cast<std::size_t>(k) % filler.size();
      const auto b = (static_cast<std::size_t>(k) / filler.size() + a + 1) % filler.size();
      entry.synonyms.push_back(entry.synonyms.front() + ' ' + filler[a] + ' ' + filler[b]);
    }
    corpus.codebook.push_back(std::move(entry));
    corpus.prevalence.push_back(spec.top_prevalence * std::pow(c + 1.0, -spec.prevalence_exponent));
  }

  std::uniform_int_distribution<std::size_t> noise_pick(0, noise.size() - 1);
  std::uniform_real_distribution<double> coin(0.0, 1.0);
  auto make_doc = [&](const std::string& id) {
    GeneratedDoc gen;
    gen.doc.id = id;
    struct Planned {
      int code;
      const std::vector<std::string>* phrase;
    };
    std::vector<Planned> planned;
    std::size_t mention_tokens = 0;
    for (int c = 0; c < spec.codes; ++c) {
      if (coin(rng) >= corpus.prevalence[static_cast<std::size_t>(c)]) continue;
      const auto& options = phrases[static_cast<std::size_t>(c)];
      const auto* phrase = &options[std::uniform_int_distribution<std::size_t>(0, options.size() - 1)(rng)];
      planned.push_back({c, phrase});
      mention_tokens += phrase->size();
      gen.doc.codes.push_back(code_name(c));
    }
    const auto length = static_cast<std::size_t>(uniform(spec.min_length, spec.max_length));
    const std::size_t lo = spec.placement == Placement::kLateOnly
                               ? static_cast<std::size_t>(spec.late_start)
                               : 0;
    // The noise stretch must reach the first admissible slot.
    const std::size_t noise_len = std::max(length > mention_tokens ? length - mention_tokens : 0, lo);
    std::vector<std::pair<std::size_t, std::size_t>> slots;  // (noise slot, planned index)
    for (std::size_t k = 0; k < planned.size(); ++k) {
      slots.emplace_back(std::uniform_int_distribution<std::size_t>(lo, noise_len)(rng), k);
    }
    std::sort(slots.begin(), slots.end());
    std::size_t s = 0;
    for (std::size_t pos = 0; pos <= noise_len; ++pos) {
      while (s < slots.size() && slots[s].first == pos) {
        const auto& p = planned[slots[s].second];
        gen.mentions.push_back({p.code, gen.doc.tokens.size(), p.phrase->size()});
        gen.doc.tokens.insert(gen.doc.tokens.end(), p.phrase->begin(), p.phrase->end());
        ++s;
      }
      if (pos < noise_len) gen.doc.tokens.push_back(noise[noise_pick(rng)]);
    }
    return gen;
  };

  auto fill = [&](std::vector<GeneratedDoc>& split, int count, const char* prefix) {
    for (int i = 0; i < count; ++i) split.push_back(make_doc(fmt::format("{}-{:05d}", prefix, i)));
  };
  fill(corpus.train, spec.train_docs, "train");
  fill(corpus.valid, spec.valid_docs, "valid");
  fill(corpus.test, spec.test_docs, "test");
  return corpus;
}

void write_corpus(const Corpus& corpus, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  auto raw = [](const std::vector<GeneratedDoc>& split) {
    std::vector<text::RawDocument> out;
    out.reserve(split.size());
    for (const auto& g : split) out.push_back(g.doc);
    return out;
  };
  text::write_raw_corpus(dir / "train.jsonl", raw(corpus.train));
  text::write_raw_corpus(dir / "valid.jsonl", raw(corpus.valid));
  text::write_raw_corpus(dir / "test.jsonl", raw(corpus.test));
  synsel::write_codebook(dir / "codebook.jsonl", corpus.codebook);
  corpus.vocab.save(dir / "vocab.txt");
}

}  // namespace msam::harness
