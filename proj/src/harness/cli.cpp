// Copyright 2026 The MSAM Authors.
// SPDX-License-Identifier: Apache-2.0

#include <fmt/format.h>

#include <CLI11.hpp>
#include <random>

#include "msam/error.hpp"
#include "msam/harness/corpus.hpp"
#include "msam/harness/pipeline.hpp"
#include "msam/text/encoder.hpp"

namespace msam::harness {

namespace fs = std::filesystem;

namespace {

std::vector<std::string> split_methods(const std::string& list) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (start <= list.size()) {
    const auto comma = list.find(',', start);
    const auto item = list.substr(start, comma == std::string::npos ? std::string::npos : comma - start);
    if (!item.empty()) out.push_back(item);
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return out;
}

void select_synonyms(const fs::path& codebook, const fs::path& vocab_path, int m,
                     const std::string& mode, const std::optional<fs::path>& config_path,
                     std::uint64_t seed, const fs::path& out) {
  Config config;
  if (config_path) config = load_config(*config_path);
  const auto vocab = text::Vocabulary::load(vocab_path);
  const auto records = synsel::normalize_codebook(synsel::read_codebook(codebook));
  std::mt19937_64 rng(seed);
  diff::ParameterSet<float> params;
  const auto encoder = text::Encoder<float>::create(encoder_config(config, vocab.size()), params, rng);
  const auto codes = synsel::build_code_embeddings(records, encoder, params, vocab, m,
                                                   synsel::parse_selection_mode(mode), rng);
  if (out.has_parent_path()) fs::create_directories(out.parent_path());
  synsel::write_selection_report(out, codes);
}

}  // namespace

int run_cli(int argc, const char* const* argv) {
  CLI::App app{"Chunked multi-synonym attention classifier with prevalence estimation"};
  app.require_subcommand(1);

  auto* gen = app.add_subcommand("gen-data", "Generate a synthetic corpus and codebook");
  fs::path spec_path, gen_out;
  gen->add_option("--spec", spec_path, "Corpus spec (key = value)")->required();
  gen->add_option("--out", gen_out, "Output directory")->required();

  auto* sel = app.add_subcommand("select-synonyms", "Pick M synonyms per code");
  fs::path sel_codebook, sel_vocab, sel_out;
  std::optional<fs::path> sel_config;
  int sel_m = 4;
  std::string sel_mode = "exact";
  std::uint64_t sel_seed = 42;
  sel->add_option("--codebook", sel_codebook, "Codebook JSONL")->required();
  sel->add_option("--vocab", sel_vocab, "Vocabulary (defaults to vocab.txt beside the codebook)");
  sel->add_option("--m", sel_m, "Synonyms per code")->check(CLI::PositiveNumber);
  sel->add_option("--mode", sel_mode, "exact|greedy|random")
      ->check(CLI::IsMember({"exact", "greedy", "random"}));
  sel->add_option("--config", sel_config, "Config for the embedding encoder");
  sel->add_option("--seed", sel_seed, "Encoder and sampling seed");
  sel->add_option("--out", sel_out, "Selection report JSON")->required();

  auto* trn = app.add_subcommand("train", "Train a classifier, optionally with quantification");
  fs::path trn_config, trn_out;
  std::string trn_model = "ce-msam", trn_quant = "none";
  trn->add_option("--config", trn_config, "Config file")->required();
  trn->add_option("--model", trn_model, "bm|ce-msam")->check(CLI::IsMember({"bm", "ce-msam"}));
  trn->add_option("--quant", trn_quant, "none|mse|huber")
      ->check(CLI::IsMember({"none", "mse", "huber"}));
  trn->add_option("--out", trn_out, "Run directory")->required();

  auto* ev = app.add_subcommand("eval", "Score a trained model on a corpus");
  fs::path ev_model, ev_corpus, ev_report;
  ev->add_option("--model", ev_model, "Run directory")->required();
  ev->add_option("--corpus", ev_corpus, "Corpus JSONL")->required();
  ev->add_option("--report", ev_report, "Report directory")->required();

  auto* qt = app.add_subcommand("quantify", "Estimate prevalences of document groups");
  fs::path qt_model, qt_groups, qt_report;
  std::optional<fs::path> qt_corpus;
  std::string qt_methods = "cc,pcc,mlp";
  qt->add_option("--model", qt_model, "Run directory")->required();
  qt->add_option("--groups", qt_groups, "Groups JSONL")->required();
  qt->add_option("--methods", qt_methods, "Comma-separated subset of cc,pcc,mlp");
  qt->add_option("--corpus", qt_corpus, "Corpus the group ids refer to (default: test_path)");
  qt->add_option("--report", qt_report, "Report directory")->required();

  auto* rp = app.add_subcommand("report", "Tabulate metrics of several runs");
  std::vector<fs::path> rp_runs;
  fs::path rp_out;
  rp->add_option("--runs", rp_runs, "Run or report directories")->required();
  rp->add_option("--out", rp_out, "Output CSV")->required();

  auto* sg = app.add_subcommand("sample-groups", "Sample quantification groups from a corpus");
  fs::path sg_corpus, sg_codebook, sg_out;
  int sg_count = 1000;
  std::uint64_t sg_seed = 42;
  sg->add_option("--corpus", sg_corpus, "Corpus JSONL")->required();
  sg->add_option("--codebook", sg_codebook, "Codebook JSONL")->required();
  sg->add_option("--count", sg_count, "Number of groups")->check(CLI::PositiveNumber);
  sg->add_option("--seed", sg_seed, "Sampling seed");
  sg->add_option("--out", sg_out, "Groups JSONL")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    if (*gen) {
      write_corpus(generate_corpus(load_corpus_spec(spec_path)), gen_out);
    } else if (*sel) {
      if (sel_vocab.empty()) sel_vocab = sel_codebook.parent_path() / "vocab.txt";
      select_synonyms(sel_codebook, sel_vocab, sel_m, sel_mode, sel_config, sel_seed, sel_out);
    } else if (*trn) {
      const auto summary = train_pipeline(
          load_config(trn_config), {parse_model_kind(trn_model), parse_quant_mode(trn_quant)}, trn_out);
      fmt::print("validation micro-F1 {:.4f}, MECE {:.4f}\n", summary.valid_metrics.at("micro_f1"),
                 summary.valid_metrics.at("mece"));
    } else if (*ev) {
      eval_pipeline(ev_model, ev_corpus, ev_report);
    } else if (*qt) {
      quantify_pipeline(qt_model, qt_groups, split_methods(qt_methods), qt_report, qt_corpus);
    } else if (*rp) {
      report_pipeline(rp_runs, rp_out);
    } else if (*sg) {
      const auto records = synsel::normalize_codebook(synsel::read_codebook(sg_codebook));
      const auto docs = load_documents(sg_corpus, text::Vocabulary{}, synsel::code_index(records));
      const auto groups = quant::sample_groups(docs, static_cast<int>(records.size()), sg_count, sg_seed);
      quant::write_groups(sg_out, groups, docs);
    }
  } catch (const Error& e) {
    fmt::print(stderr, "error: {}\n", e.what());
    return 1;
  } catch (const std::exception& e) {
    fmt::print(stderr, "error: {}\n", e.what());
    return 1;
  }
  return 0;
}

}  // namespace msam::harness
