// Copyright 2026 The MSAM Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <span>
#include <string>

namespace msam::train {

enum class QuantLossKind { kMse, kHuber };

QuantLossKind parse_quant_loss(const std::string& name);  // "mse" | "huber"
std::string to_string(QuantLossKind kind);

struct LossConfig {
  double lambda = 100.0;
  double delta = 0.01;
  QuantLossKind kind = QuantLossKind::kHuber;
  void validate() const;
};

// Summed binary cross-entropy in logit form: max(z, 0) - z y + log(1 + e^-|z|).
double bce(std::span<const double> y, std::span<const double> logits);

// sum_l (est_l - truth_l)^2
double quant_loss_mse(std::span<const double> est, std::span<const double> truth);

// Element-wise Huber on |est_l - truth_l| summed over classes.
double quant_loss_huber(std::span<const double> est, std::span<const double> truth,
                        double delta);

double quant_loss(const LossConfig& config, std::span<const double> est,
                  std::span<const double> truth);

inline double combined_loss(double classification, double quantification, double lambda) {
  return classification + lambda * quantification;
}

}  // namespace msam::train
