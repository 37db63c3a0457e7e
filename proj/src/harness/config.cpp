// Copyright 2026 The MSAM Authors.
// SPDX-License-Identifier: Apache-2.0

#include "msam/harness/config.hpp"

#include <fmt/format.h>

#include <cstdlib>
#include <fstream>
#include <sstream>

#include "msam/error.hpp"

namespace msam::harness {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

template <typename V>
V parse_number(const std::string& key, const std::string& value, const std::string& origin) {
  std::istringstream in(value);
  V out{};
  in >> out;
  if (in.fail() || !in.eof()) {
    throw FormatError(fmt::format("{}: key '{}' has invalid value '{}'", origin, key, value));
  }
  return out;
}

std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

bool parse_bool(const std::string& key, const std::string& value, const std::string& origin) {
  if (value == "true" || value == "1") return true;
  if (value == "false" || value == "0") return false;
  throw FormatError(fmt::format("{}: key '{}' expects true or false, got '{}'", origin, key, value));
}

bool is_path_key(const std::string& key) { return key.size() > 5 && key.ends_with("_path"); }

}  // namespace

std::map<std::string, std::string> parse_key_values(const std::string& text,
                                                    const std::string& origin) {
  std::map<std::string, std::string> out;
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw FormatError(fmt::format("{}:{}: expected key = value", origin, line_no));
    }
    const auto key = trim(line.substr(0, eq));
    if (key.empty()) throw FormatError(fmt::format("{}:{}: empty key", origin, line_no));
    if (!out.emplace(key, trim(line.substr(eq + 1))).second) {
      throw FormatError(fmt::format("{}:{}: duplicate key '{}'", origin, line_no, key));
    }
  }
  return out;
}

void Config::validate() const {
  auto require = [](bool ok, const std::string& what) {
    if (!ok) throw Error("invalid config: " + what);
  };
  require(T >= 3, fmt::format("T = {} must be >= 3", T));
  require(overlap >= 0 && overlap < T - 1, fmt::format("overlap = {} must lie in [0, T - 1)", overlap));
  require(Z >= 1 && H >= 1 && H % Z == 0, fmt::format("H = {} must be divisible by Z = {}", H, Z));
  require(Z == M, fmt::format("Z = {} must equal M = {}", Z, M));
  require(L >= 2, "L must be >= 2");
  require(lambda >= 0.0, "lambda must be >= 0");
  require(delta > 0.0, "delta must be > 0");
  require(lr_stage1 > 0.0 && lr_stage2 > 0.0 && lr_refiner > 0.0 && lr_clq > 0.0,
          "learning rates must be positive");
  require(patience >= 1, "patience must be >= 1");
  require(max_epochs >= 0, "max_epochs must be >= 0");
  require(batch_size >= 1, "batch_size must be >= 1");
  require(mlp_hidden >= 1 && mlp_hidden < L, "mlp_hidden must lie in [1, L)");
  require(encoder_blocks >= 1, "encoder_blocks must be >= 1");
  require(encoder_heads >= 1 && H % encoder_heads == 0, "encoder_heads must divide H");
  require(ffn_hidden >= 1, "ffn_hidden must be >= 1");
  require(valid_groups >= 1 && test_groups >= 1, "group counts must be >= 1");
  require(clq_stop == "microF1" || clq_stop == "MECE" || clq_stop == "quantMSE",
          "clq_stop must be microF1, MECE or quantMSE");
}

std::string Config::to_text() const {
  std::string s;
  auto put = [&](const char* key, const auto& value) { s += fmt::format("{} = {}\n", key, value); };
  put("T", T);
  put("overlap", overlap);
  put("H", H);
  put("Z", Z);
  put("M", M);
  put("L", L);
  put("lambda", lambda);
  put("delta", delta);
  put("quant_loss_kind", train::to_string(quant_loss_kind));
  put("lr_stage1", lr_stage1);
  put("lr_stage2", lr_stage2);
  put("lr_refiner", lr_refiner);
  put("lr_clq", lr_clq);
  put("patience", patience);
  put("max_epochs", max_epochs);
  put("batch_size", batch_size);
  put("mlp_hidden", mlp_hidden);
  put("seed", seed);
  put("encoder_blocks", encoder_blocks);
  put("encoder_heads", encoder_heads);
  put("ffn_hidden", ffn_hidden);
  put("selection_mode", synsel::to_string(selection_mode));
  put("valid_groups", valid_groups);
  put("test_groups", test_groups);
  put("clq_stop", clq_stop);
  put("code_centering", code_centering ? "true" : "false");
  put("train_path", train_path);
  put("valid_path", valid_path);
  put("test_path", test_path);
  put("codebook_path", codebook_path);
  put("vocab_path", vocab_path);
  return s;
}

std::uint64_t Config::hash() const {
  std::string canonical;
  std::istringstream in(to_text());
  std::string line;
  while (std::getline(in, line)) {
    if (!is_path_key(trim(line.substr(0, line.find('='))))) canonical += line + '\n';
  }
  return fnv1a(canonical);
}

Config parse_config(const std::string& text, const std::string& origin) {
  Config c;
  for (const auto& [key, value] : parse_key_values(text, origin)) {
    auto i64 = [&] { return parse_number<std::int64_t>(key, value, origin); };
    auto i32 = [&] { return parse_number<int>(key, value, origin); };
    auto f64 = [&] { return parse_number<double>(key, value, origin); };
    try {
      if (key == "T") c.T = i64();
      else if (key == "overlap") c.overlap = i64();
      else if (key == "H") c.H = i64();
      else if (key == "Z") c.Z = i64();
      else if (key == "M") c.M = i32();
      else if (key == "L") c.L = i32();
      else if (key == "lambda") c.lambda = f64();
      else if (key == "delta") c.delta = f64();
      else if (key == "quant_loss_kind") c.quant_loss_kind = train::parse_quant_loss(value);
      else if (key == "lr_stage1") c.lr_stage1 = f64();
      else if (key == "lr_stage2") c.lr_stage2 = f64();
      else if (key == "lr_refiner") c.lr_refiner = f64();
      else if (key == "lr_clq") c.lr_clq = f64();
      else if (key == "patience") c.patience = i32();
      else if (key == "max_epochs") c.max_epochs = i32();
      else if (key == "batch_size") c.batch_size = i32();
      else if (key == "mlp_hidden") c.mlp_hidden = i32();
      else if (key == "seed") c.seed = parse_number<std::uint64_t>(key, value, origin);
      else if (key == "train_path") c.train_path = value;
      else if (key == "valid_path") c.valid_path = value;
      else if (key == "test_path") c.test_path = value;
      else if (key == "codebook_path") c.codebook_path = value;
      else if (key == "vocab_path") c.vocab_path = value;
      else if (key == "encoder_blocks") c.encoder_blocks = i32();
      else if (key == "encoder_heads") c.encoder_heads = i32();
      else if (key == "ffn_hidden") c.ffn_hidden = i32();
      else if (key == "selection_mode") c.selection_mode = synsel::parse_selection_mode(value);
      else if (key == "valid_groups") c.valid_groups = i32();
      else if (key == "test_groups") c.test_groups = i32();
      else if (key == "clq_stop") c.clq_stop = value;
      else if (key == "code_centering") c.code_centering = parse_bool(key, value, origin);
      else throw FormatError(fmt::format("{}: unknown key '{}'", origin, key));
    } catch (const FormatError&) {
      throw;
    } catch (const Error& e) {
      throw FormatError(fmt::format("{}: key '{}': {}", origin, key, e.what()));
    }
  }
  c.validate();
  return c;
}

void apply_env_overrides(Config& config) {
  if (const char* seed = std::getenv("MSAM_SEED"); seed != nullptr && *seed != '\0') {
    config.seed = parse_number<std::uint64_t>("MSAM_SEED", seed, "environment");
  }
}

Config load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(fmt::format("cannot read config {}", path.string()));
  std::stringstream buf;
  buf << in.rdbuf();
  Config c = parse_config(buf.str(), path.string());
  const auto base = path.parent_path();
  for (auto* p : {&c.train_path, &c.valid_path, &c.test_path, &c.codebook_path, &c.vocab_path}) {
    if (!p->empty() && std::filesystem::path(*p).is_relative()) *p = (base / *p).string();
  }
  apply_env_overrides(c);
  return c;
}

}  // namespace msam::harness
