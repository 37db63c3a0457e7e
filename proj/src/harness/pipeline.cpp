// Copyright 2026 The MSAM Authors.
// SPDX-License-Identifier: Apache-2.0

#include "msam/harness/pipeline.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <fstream>
#include <limits>
#include <json.hpp>
#include <set>
#include <sstream>

#include "msam/error.hpp"
#include "msam/harness/checkpoint.hpp"
#include "msam/metrics/report.hpp"
#include "msam/model/models.hpp"
#include "msam/train/clq.hpp"

#ifndef MSAM_CODE_VERSION
#define MSAM_CODE_VERSION "unknown"
#endif

namespace msam::harness {

using nlohmann::json;
namespace fs = std::filesystem;

ModelKind parse_model_kind(const std::string& name) {
  if (name == "bm") return ModelKind::kBm;
  if (name == "ce-msam") return ModelKind::kCeMsam;
  throw Error(fmt::format("unknown model '{}' (bm or ce-msam)", name));
}

std::string to_string(ModelKind kind) { return kind == ModelKind::kBm ? "bm" : "ce-msam"; }

QuantMode parse_quant_mode(const std::string& name) {
  if (name == "none") return QuantMode::kNone;
  if (name == "mse") return QuantMode::kMse;
  if (name == "huber") return QuantMode::kHuber;
  throw Error(fmt::format("unknown quantification mode '{}' (none, mse or huber)", name));
}

std::string to_string(QuantMode mode) {
  switch (mode) {
    case QuantMode::kNone: return "none";
    case QuantMode::kMse: return "mse";
    case QuantMode::kHuber: return "huber";
  }
  return "unknown";
}

std::string code_version() { return MSAM_CODE_VERSION; }

namespace {

std::vector<std::string> names_of(const std::vector<synsel::SynonymRecord>& records) {
  std::vector<std::string> out;
  for (const auto& r : records) out.push_back(r.code);
  return out;
}

json read_json(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(fmt::format("cannot read {}", path.string()));
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw FormatError(fmt::format("{}: {}", path.string(), e.what()));
  }
}

void write_json(const fs::path& path, const json& j) {
  std::ofstream out(path);
  if (!out) throw Error(fmt::format("cannot write {}", path.string()));
  out << j.dump(2) << '\n';
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw Error(fmt::format("cannot write {}", path.string()));
  out << text;
}

}  // namespace

std::vector<std::string> Dataset::code_names() const { return names_of(records); }

std::vector<text::Document> load_documents(const fs::path& path, const text::Vocabulary& vocab,
                                           const std::unordered_map<std::string, int>& code_index) {
  auto docs = text::to_documents(text::read_raw_corpus(path), vocab, code_index);
  if (docs.empty()) throw Error(fmt::format("{} contains no documents", path.string()));
  for (const auto& d : docs) d.validate(static_cast<int>(code_index.size()));
  return docs;
}

Dataset load_dataset(const Config& config) {
  if (config.train_path.empty() || config.valid_path.empty() || config.codebook_path.empty() ||
      config.vocab_path.empty()) {
    throw Error("config must name train_path, valid_path, codebook_path and vocab_path");
  }
  Dataset d;
  d.vocab = text::Vocabulary::load(config.vocab_path);
  d.records = synsel::normalize_codebook(synsel::read_codebook(config.codebook_path));
  d.code_index = synsel::code_index(d.records);
  if (static_cast<int>(d.records.size()) != config.L) {
    throw Error(fmt::format("config L = {} but the codebook has {} codes", config.L,
                            d.records.size()));
  }
  d.train = load_documents(config.train_path, d.vocab, d.code_index);
  d.valid = load_documents(config.valid_path, d.vocab, d.code_index);
  if (!config.test_path.empty()) d.test = load_documents(config.test_path, d.vocab, d.code_index);
  return d;
}

text::EncoderConfig encoder_config(const Config& config, std::size_t vocab_size) {
  text::EncoderConfig e;
  e.vocab_size = static_cast<std::int64_t>(vocab_size);
  e.max_len = config.T;
  e.hidden = config.H;
  e.heads = config.encoder_heads;
  e.ffn = config.ffn_hidden;
  e.blocks = config.encoder_blocks;
  return e;
}

std::unique_ptr<model::Classifier<float>> make_model(ModelKind kind, const Config& config,
                                                     const Dataset& data, std::mt19937_64& rng) {
  const auto enc = encoder_config(config, data.vocab.size());
  if (kind == ModelKind::kBm) return std::make_unique<model::BmModel<float>>(enc, config.L, rng);
  // Code embeddings come from the freshly initialised encoder and stay frozen.
  diff::ParameterSet<float> params;
  const auto encoder = text::Encoder<float>::create(enc, params, rng);
  auto codes = synsel::build_code_embeddings(data.records, encoder, params, data.vocab, config.M,
                                             config.selection_mode, rng);
  if (config.code_centering) codes.center();
  model::MsamHead<float>::create({config.H, config.Z, config.L}, params, rng);
  return std::make_unique<model::CeMsamModel<float>>(enc, config.overlap, config.Z,
                                                     std::move(codes), std::move(params));
}

std::vector<std::string> TrainedModel::code_names() const { return names_of(records); }
std::unordered_map<std::string, int> TrainedModel::code_index() const {
  return synsel::code_index(records);
}

void save_trained_model(const fs::path& dir, const TrainedModel& trained,
                        const std::vector<std::pair<std::string, double>>& metrics) {
  fs::create_directories(dir);
  write_text(dir / "config.txt", trained.config.to_text());
  trained.vocab.save(dir / "vocab.txt");
  std::vector<synsel::CodebookEntry> entries;
  for (const auto& r : trained.records) entries.push_back({r.code, r.variants});
  synsel::write_codebook(dir / "codebook.jsonl", entries);

  Checkpoint ck;
  ck.config_hash = trained.config.hash();
  ck.metrics = metrics;
  add_parameters(ck, trained.model->params(), "model.");
  if (const auto* ce = dynamic_cast<const model::CeMsamModel<float>*>(trained.model.get())) {
    const auto& codes = ce->codes();
    for (int l = 0; l < codes.codes(); ++l) {
      ck.tensors.push_back({fmt::format("codes.query.{}", l), codes.queries[static_cast<std::size_t>(l)]});
    }
    synsel::write_selection_report(dir / "selection.json", codes);
  }
  save_checkpoint(dir / "model.ckpt", ck);
  write_json(dir / "model.json", {{"model", to_string(trained.kind)},
                                  {"codes", trained.code_names()},
                                  {"refiner", trained.refiner.has_value()}});
  if (trained.refiner) {
    Checkpoint rk;
    rk.config_hash = trained.config.hash();
    add_parameters(rk, trained.refiner->params());
    save_checkpoint(dir / "refiner.ckpt", rk);
  }
}

TrainedModel load_trained_model(const fs::path& dir) {
  TrainedModel t;
  std::ifstream cfg(dir / "config.txt");
  if (!cfg) throw Error(fmt::format("{} is not a model directory (no config.txt)", dir.string()));
  std::stringstream buf;
  buf << cfg.rdbuf();
  t.config = parse_config(buf.str(), (dir / "config.txt").string());
  const auto meta = read_json(dir / "model.json");
  t.kind = parse_model_kind(meta.at("model").get<std::string>());
  t.vocab = text::Vocabulary::load(dir / "vocab.txt");
  t.records = synsel::normalize_codebook(synsel::read_codebook(dir / "codebook.jsonl"));

  const auto ck = load_checkpoint(dir / "model.ckpt");
  if (ck.config_hash != t.config.hash()) {
    throw FormatError(fmt::format("checkpoint {} was written for a different config",
                                  (dir / "model.ckpt").string()));
  }
  const auto enc = encoder_config(t.config, t.vocab.size());
  auto params = extract_parameters(ck, "model.");
  if (t.kind == ModelKind::kBm) {
    t.model = std::make_unique<model::BmModel<float>>(enc, t.config.L, std::move(params));
  } else {
    synsel::CodeEmbeddings<float> codes;
    for (int l = 0; l < t.config.L; ++l) codes.queries.push_back(ck.tensor(fmt::format("codes.query.{}", l)));
    codes.recompute_pooled();
    t.model = std::make_unique<model::CeMsamModel<float>>(enc, t.config.overlap, t.config.Z,
                                                          std::move(codes), std::move(params));
  }
  if (fs::exists(dir / "refiner.ckpt")) {
    const auto rk = load_checkpoint(dir / "refiner.ckpt");
    t.refiner = quant::Refiner<float>::attach({t.config.L, t.config.mlp_hidden},
                                              extract_parameters(rk, ""));
  }
  return t;
}

std::vector<std::vector<double>> predict_all(const model::Classifier<float>& model,
                                             std::span<const text::Document> docs) {
  std::vector<std::vector<double>> out;
  out.reserve(docs.size());
  for (const auto& d : docs) {
    const auto p = model.predict(d);
    out.emplace_back(p.begin(), p.end());
  }
  return out;
}

GroupData group_data(std::span<const std::vector<double>> probs,
                     std::span<const quant::QuantGroup> groups) {
  GroupData out;
  std::vector<std::vector<double>> rows;
  for (const auto& g : groups) {
    rows.clear();
    for (auto m : g.members) rows.push_back(probs[m]);
    out.pcc.push_back(quant::pcc_estimate(rows));
    out.truth.push_back(g.prevalence);
  }
  return out;
}

namespace {

quant::RefinerTrainConfig refiner_train_config(const Config& c) {
  quant::RefinerTrainConfig r;
  r.lr0 = c.lr_refiner;
  r.max_epochs = c.max_epochs;
  r.patience = c.patience;
  r.batch_size = c.batch_size;
  r.seed = c.seed + 2;
  return r;
}

json history_json(const std::vector<train::EpochRecord>& history) {
  json arr = json::array();
  for (const auto& r : history) {
    arr.push_back({{"stage", r.stage}, {"epoch", r.epoch}, {"lr", r.lr},
                   {"train_loss", r.train_loss}, {"quant_loss", r.quant_loss},
                   {"micro_f1", r.micro_f1}, {"macro_f1", r.macro_f1}, {"mece", r.mece},
                   {"criterion", r.criterion_value}, {"improved", r.improved}});
  }
  return arr;
}

void write_history_csv(const fs::path& path, const std::vector<train::EpochRecord>& history) {
  std::ofstream out(path);
  if (!out) throw Error(fmt::format("cannot write {}", path.string()));
  out << "stage,epoch,lr,train_loss,quant_loss,micro_f1,macro_f1,mece,criterion,improved\n";
  for (const auto& r : history) {
    out << fmt::format("{},{},{:.6g},{:.6g},{:.6g},{:.6f},{:.6f},{:.6f},{:.6f},{}\n", r.stage,
                       r.epoch, r.lr, r.train_loss, r.quant_loss, r.micro_f1, r.macro_f1, r.mece,
                       r.criterion_value, r.improved ? 1 : 0);
  }
}

}  // namespace

quant::Refiner<float> fit_refiner(const Config& c, const model::Classifier<float>& model,
                                  std::span<const text::Document> valid, std::mt19937_64& rng) {
  const auto groups = quant::sample_groups(valid, c.L, c.valid_groups, c.seed + 1);
  const auto data = group_data(predict_all(model, valid), groups);
  auto refiner = quant::Refiner<float>::create({c.L, c.mlp_hidden}, rng);
  quant::train_refiner_standalone(refiner, data.pcc, data.truth, refiner_train_config(c));
  return refiner;
}

TrainSummary train_pipeline(const Config& config, const TrainOptions& options,
                            const fs::path& out_dir) {
  config.validate();
  const auto data = load_dataset(config);
  std::mt19937_64 rng(config.seed);

  TrainedModel trained;
  trained.config = config;
  trained.kind = options.kind;
  trained.vocab = data.vocab;
  trained.records = data.records;
  trained.model = make_model(options.kind, config, data, rng);

  const auto log = [](const train::EpochRecord& r) {
    fmt::print(stderr, "[{}] epoch {:3d} loss {:.5f} micro-F1 {:.4f} MECE {:.4f}{}\n", r.stage,
               r.epoch, r.train_loss, r.micro_f1, r.mece, r.improved ? " *" : "");
  };

  train::TwoStageConfig two;
  two.stage1 = {"stage1", config.lr_stage1, config.max_epochs, config.patience, config.batch_size,
                train::StopCriterion::kMicroF1};
  two.stage2 = {"stage2", config.lr_stage2, config.max_epochs, config.patience, config.batch_size,
                train::StopCriterion::kMece};
  TrainSummary summary;
  summary.history =
      train::train_classifier_two_stage(*trained.model, data.train, data.valid, two, rng, log)
          .history();

  if (options.quant != QuantMode::kNone) {
    auto refiner = fit_refiner(config, *trained.model, data.valid, rng);
    train::ClqConfig clq;
    clq.loss = {config.lambda, config.delta,
                options.quant == QuantMode::kMse ? train::QuantLossKind::kMse
                                                 : train::QuantLossKind::kHuber};
    clq.batch_size = config.batch_size;
    clq.lr0 = config.lr_clq;
    clq.refiner_lr0 = config.lr_refiner;
    clq.max_epochs = config.max_epochs;
    clq.patience = config.patience;
    clq.criterion = train::parse_stop_criterion(config.clq_stop);
    std::vector<quant::QuantGroup> groups;
    if (clq.criterion == train::StopCriterion::kQuantMse) {
      groups = quant::sample_groups(data.valid, config.L, config.valid_groups, config.seed + 1);
    }
    const auto res = train::train_clq(*trained.model, refiner, data.train, data.valid, groups, clq,
                                      config.seed + 3, log);
    summary.history.insert(summary.history.end(), res.history.begin(), res.history.end());
    trained.refiner = std::move(refiner);
  }

  const auto report = metrics::classification_report(train::evaluate(*trained.model, data.valid));
  summary.valid_metrics = report.summary;
  std::vector<std::pair<std::string, double>> snapshot(report.summary.begin(), report.summary.end());
  save_trained_model(out_dir, trained, snapshot);
  write_history_csv(out_dir / "history.csv", summary.history);
  write_json(out_dir / "manifest.json",
             {{"seed", config.seed},
              {"config_hash", fmt::format("{:016x}", config.hash())},
              {"code_version", code_version()},
              {"model", to_string(options.kind)},
              {"quant", to_string(options.quant)},
              {"history", history_json(summary.history)},
              {"valid_metrics", report.summary}});
  return summary;
}

void eval_pipeline(const fs::path& model_dir, const fs::path& corpus, const fs::path& report_dir) {
  const auto trained = load_trained_model(model_dir);
  const auto docs = load_documents(corpus, trained.vocab, trained.code_index());
  const auto report = metrics::classification_report(train::evaluate(*trained.model, docs));
  metrics::write_classification_report(report_dir, report, trained.code_names());
}

void quantify_pipeline(const fs::path& model_dir, const fs::path& groups_path,
                       const std::vector<std::string>& methods, const fs::path& report_dir,
                       const std::optional<fs::path>& corpus) {
  if (methods.empty()) throw Error("quantify: no methods requested");
  for (const auto& m : methods) {
    if (m != "cc" && m != "pcc" && m != "mlp") {
      throw Error(fmt::format("quantify: unknown method '{}' (cc, pcc or mlp)", m));
    }
  }
  auto trained = load_trained_model(model_dir);
  const auto& c = trained.config;
  const fs::path corpus_path = corpus ? *corpus : fs::path(c.test_path);
  if (corpus_path.empty()) throw Error("quantify: no corpus given and the config has no test_path");
  const auto index = trained.code_index();
  const auto docs = load_documents(corpus_path, trained.vocab, index);
  const auto groups = quant::read_groups(groups_path, docs, c.L);
  if (groups.empty()) throw Error(fmt::format("{} has no groups", groups_path.string()));
  const auto probs = predict_all(*trained.model, docs);
  fs::create_directories(report_dir);

  const bool want_mlp = std::find(methods.begin(), methods.end(), "mlp") != methods.end();
  if (want_mlp && !trained.refiner) {
    std::mt19937_64 rng(c.seed + 4);
    const auto valid = load_documents(c.valid_path, trained.vocab, index);
    trained.refiner = fit_refiner(c, *trained.model, valid, rng);
    Checkpoint rk;
    rk.config_hash = c.hash();
    add_parameters(rk, trained.refiner->params());
    save_checkpoint(report_dir / "refiner.ckpt", rk);
  }

  std::vector<quant::EstimateRow> rows;
  json summary;
  std::vector<std::vector<double>> members;
  std::vector<int> sizes;
  std::vector<std::vector<double>> truths;
  for (const auto& g : groups) {
    sizes.push_back(g.size());
    truths.push_back(g.prevalence);
  }
  for (const auto& method : methods) {
    std::vector<std::vector<double>> estimates;
    for (std::size_t gi = 0; gi < groups.size(); ++gi) {
      members.clear();
      for (auto m : groups[gi].members) members.push_back(probs[m]);
      std::vector<double> est;
      if (method == "cc") est = quant::cc_estimate(members);
      else if (method == "pcc") est = quant::pcc_estimate(members);
      else est = trained.refiner->refine(quant::pcc_estimate(members));
      for (int l = 0; l < c.L; ++l) {
        rows.push_back({gi, method, l, est[static_cast<std::size_t>(l)],
                        groups[gi].prevalence[static_cast<std::size_t>(l)]});
      }
      estimates.push_back(std::move(est));
    }
    const auto err = metrics::quant_errors(estimates, truths, sizes);
    summary[method] = {{"mae", err.mae}, {"mrae", err.mrae}};
  }
  quant::write_estimates(report_dir / "estimates.csv", rows);
  write_json(report_dir / "quant_metrics.json", summary);
}

namespace {

// Undefined metrics (e.g. AUC of a class without positives) are stored as null.
double metric_value(const json& v) {
  return v.is_null() ? std::numeric_limits<double>::quiet_NaN() : v.get<double>();
}

}  // namespace

void report_pipeline(const std::vector<fs::path>& runs, const fs::path& out) {
  if (runs.empty()) throw Error("report: no run directories");
  std::vector<std::map<std::string, double>> tables;
  std::set<std::string> columns;
  for (const auto& run : runs) {
    std::map<std::string, double> row;
    bool found = false;
    if (fs::exists(run / "metrics.json")) {
      const auto metrics = read_json(run / "metrics.json");
      for (const auto& [k, v] : metrics.items()) row[k] = metric_value(v);
      found = true;
    }
    if (fs::exists(run / "quant_metrics.json")) {
      const auto quant = read_json(run / "quant_metrics.json");
      for (const auto& [method, errs] : quant.items()) {
        for (const auto& [k, v] : errs.items()) row[k + "_" + method] = metric_value(v);
      }
      found = true;
    }
    if (fs::exists(run / "manifest.json")) {
      const auto manifest = read_json(run / "manifest.json");
      for (const auto& [k, v] : manifest.at("valid_metrics").items()) {
        row.emplace("valid_" + k, metric_value(v));
      }
      found = true;
    }
    if (!found) throw Error(fmt::format("report: {} holds no metrics", run.string()));
    for (const auto& [k, v] : row) columns.insert(k);
    tables.push_back(std::move(row));
  }
  if (out.has_parent_path()) fs::create_directories(out.parent_path());
  std::ofstream csv(out);
  if (!csv) throw Error(fmt::format("cannot write {}", out.string()));
  csv << "run";
  for (const auto& col : columns) csv << ',' << col;
  csv << '\n';
  for (std::size_t i = 0; i < runs.size(); ++i) {
    csv << runs[i].string();
    for (const auto& col : columns) {
      const auto it = tables[i].find(col);
      csv << ',' << (it == tables[i].end() ? std::string() : fmt::format("{:.6f}", it->second));
    }
    csv << '\n';
  }
}

}  // namespace msam::harness
