// Copyright 2026 The MSAM Authors.
// SPDX-License-Identifier: Apache-2.0

#include "msam/train/losses.hpp"

#include <fmt/format.h>

#include <cmath>

#include "msam/error.hpp"

namespace msam::train {

QuantLossKind parse_quant_loss(const std::string& name) {
  if (name == "mse") return QuantLossKind::kMse;
  if (name == "huber") return QuantLossKind::kHuber;
  throw Error(fmt::format("unknown quantification loss '{}' (expected mse or huber)", name));
}

std::string to_string(QuantLossKind kind) {
  return kind == QuantLossKind::kMse ? "mse" : "huber";
}

void LossConfig::validate() const {
  if (!(lambda >= 0.0)) throw Error(fmt::format("lambda must be >= 0, got {}", lambda));
  if (!(delta > 0.0)) throw Error(fmt::format("delta must be > 0, got {}", delta));
}

namespace {

void check_lengths(std::size_t a, std::size_t b, const char* what) {
  if (a != b) throw DimensionError(fmt::format("{}: lengths {} and {} differ", what, a, b));
}

}  // namespace

double bce(std::span<const double> y, std::span<const double> logits) {
  check_lengths(y.size(), logits.size(), "bce");
  double total = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    if (y[i] != 0.0 && y[i] != 1.0) throw Error(fmt::format("bce: target {} is not binary", y[i]));
    const double z = logits[i];
    total += std::max(z, 0.0) - z * y[i] + std::log1p(std::exp(-std::abs(z)));
  }
  return total;
}

double quant_loss_mse(std::span<const double> est, std::span<const double> truth) {
  check_lengths(est.size(), truth.size(), "quant_loss_mse");
  double total = 0.0;
  for (std::size_t i = 0; i < est.size(); ++i) {
    const double d = std::abs(est[i] - truth[i]);
    total += d * d;
  }
  return total;
}

double quant_loss_huber(std::span<const double> est, std::span<const double> truth,
                        double delta) {
  check_lengths(est.size(), truth.size(), "quant_loss_huber");
  if (!(delta > 0.0)) throw Error("quant_loss_huber: delta must be positive");
  double total = 0.0;
  for (std::size_t i = 0; i < est.size(); ++i) {
    const double d = std::abs(est[i] - truth[i]);
    total += d < delta ? 0.5 * d * d : delta * (d - 0.5 * delta);
  }
  return total;
}

double quant_loss(const LossConfig& config, std::span<const double> est,
                  std::span<const double> truth) {
  return config.kind == QuantLossKind::kMse ? quant_loss_mse(est, truth)
                                            : quant_loss_huber(est, truth, config.delta);
}

}  // namespace msam::train
