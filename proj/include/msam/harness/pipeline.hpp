// Copyright 2026 The MSAM Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <memory>
#include <optional>
#include <random>
#include <string>
#include <unordered_map>
#include <vector>

#include "msam/harness/config.hpp"
#include "msam/model/classifier.hpp"
#include "msam/quant/quant.hpp"
#include "msam/synsel/codebook.hpp"
#include "msam/train/trainer.hpp"

namespace msam::harness {

enum class ModelKind { kBm, kCeMsam };
enum class QuantMode { kNone, kMse, kHuber };

ModelKind parse_model_kind(const std::string& name);  // bm | ce-msam
std::string to_string(ModelKind kind);
QuantMode parse_quant_mode(const std::string& name);  // none | mse | huber
std::string to_string(QuantMode mode);

std::string code_version();

struct Dataset {
  text::Vocabulary vocab;
  std::vector<synsel::SynonymRecord> records;
  std::unordered_map<std::string, int> code_index;
  std::vector<text::Document> train, valid, test;  // test empty when test_path is unset

  std::vector<std::string> code_names() const;
};

// Reads vocabulary, codebook and splits named by `config`; L must match the
// codebook.
Dataset load_dataset(const Config& config);
std::vector<text::Document> load_documents(const std::filesystem::path& path,
                                           const text::Vocabulary& vocab,
                                           const std::unordered_map<std::string, int>& code_index);

text::EncoderConfig encoder_config(const Config& config, std::size_t vocab_size);

std::unique_ptr<model::Classifier<float>> make_model(ModelKind kind, const Config& config,
                                                     const Dataset& data, std::mt19937_64& rng);

// Everything needed to score documents with a trained run.
struct TrainedModel {
  Config config;
  ModelKind kind = ModelKind::kCeMsam;
  text::Vocabulary vocab;
  std::vector<synsel::SynonymRecord> records;
  std::unique_ptr<model::Classifier<float>> model;
  std::optional<quant::Refiner<float>> refiner;

  std::vector<std::string> code_names() const;
  std::unordered_map<std::string, int> code_index() const;
};

// Writes config.txt, vocab.txt, codebook.jsonl, model.ckpt and, when present,
// refiner.ckpt into `dir`.
void save_trained_model(const std::filesystem::path& dir, const TrainedModel& trained,
                        const std::vector<std::pair<std::string, double>>& metrics);
TrainedModel load_trained_model(const std::filesystem::path& dir);

struct TrainOptions {
  ModelKind kind = ModelKind::kCeMsam;
  QuantMode quant = QuantMode::kNone;
};

struct TrainSummary {
  std::vector<train::EpochRecord> history;
  std::map<std::string, double> valid_metrics;
};

// Two-stage classifier training; with quantification enabled it then fits a
// standalone refiner on validation groups and runs joint epochs. Writes the
// model files, history.csv and manifest.json into `out_dir`.
TrainSummary train_pipeline(const Config& config, const TrainOptions& options,
                            const std::filesystem::path& out_dir);

// Probabilities of `trained` on every document.
std::vector<std::vector<double>> predict_all(const model::Classifier<float>& model,
                                             std::span<const text::Document> docs);

// PCC vectors and true prevalences of groups sampled from `docs`.
struct GroupData {
  std::vector<std::vector<double>> pcc;
  std::vector<std::vector<double>> truth;
};
GroupData group_data(std::span<const std::vector<double>> probs,
                     std::span<const quant::QuantGroup> groups);

// Standalone refiner fitted on `valid_groups` groups sampled from `valid`.
quant::Refiner<float> fit_refiner(const Config& config, const model::Classifier<float>& model,
                                  std::span<const text::Document> valid, std::mt19937_64& rng);

void eval_pipeline(const std::filesystem::path& model_dir, const std::filesystem::path& corpus,
                   const std::filesystem::path& report_dir);

void quantify_pipeline(const std::filesystem::path& model_dir,
                       const std::filesystem::path& groups_path,
                       const std::vector<std::string>& methods,
                       const std::filesystem::path& report_dir,
                       const std::optional<std::filesystem::path>& corpus);

// One CSV row per run directory with every metric found in its metrics.json
// and quant_metrics.json.
void report_pipeline(const std::vector<std::filesystem::path>& runs,
                     const std::filesystem::path& out);

// Entry point of the command-line tool.
int run_cli(int argc, const char* const* argv);

}  // namespace msam::harness
