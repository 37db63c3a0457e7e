// Copyright 2026 The MSAM Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>

#include "msam/synsel/diversity.hpp"
#include "msam/train/losses.hpp"

namespace msam::harness {

// Flat "key = value" text; '#' starts a comment. Unknown keys are errors.
std::map<std::string, std::string> parse_key_values(const std::string& text,
                                                    const std::string& origin);

struct Config {
  std::int64_t T = 512;
  std::int64_t overlap = 255;
  std::int64_t H = 64;
  std::int64_t Z = 4;
  int M = 4;
  int L = 20;
  double lambda = 100.0;
  double delta = 0.01;
  train::QuantLossKind quant_loss_kind = train::QuantLossKind::kHuber;
  double lr_stage1 = 2e-5;
  double lr_stage2 = 2e-7;
  double lr_refiner = 2e-5;
  double lr_clq = 2e-5;
  int patience = 5;
  int max_epochs = 300;
  int batch_size = 16;
  int mlp_hidden = 8;
  std::uint64_t seed = 42;
  std::string train_path;
  std::string valid_path;
  std::string test_path;
  std::string codebook_path;
  std::string vocab_path;
  int encoder_blocks = 1;
  int encoder_heads = 4;
  int ffn_hidden = 128;
  synsel::SelectionMode selection_mode = synsel::SelectionMode::kExact;
  int valid_groups = 5000;
  int test_groups = 1000;
  std::string clq_stop = "microF1";
  bool code_centering = true;

  // Throws on H % Z != 0, Z != M and out-of-range values.
  void validate() const;
  // Canonical "key = value" rendering; round-trips through parse_config.
  std::string to_text() const;
  // FNV-1a of to_text() without the path keys.
  std::uint64_t hash() const;
};

Config parse_config(const std::string& text, const std::string& origin = "<config>");
// Relative paths are resolved against the file's directory; MSAM_SEED, when
// set, replaces the seed.
Config load_config(const std::filesystem::path& path);
void apply_env_overrides(Config& config);

}  // namespace msam::harness
