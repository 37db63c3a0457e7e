// Copyright 2026 The MSAM Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "msam/metrics/metrics.hpp"

namespace msam::metrics {

struct ClassificationReport {
  std::map<std::string, double> summary;
  std::vector<double> f1, auc, ece, prevalence;  // per class; auc is NaN when undefined
};

// F1, AUC, P@n (n = min(5, L)), MECE and their low/medium/high frequency
// bands, the bands ranked by `frequency` (gold prevalence when empty).
ClassificationReport classification_report(const EvalBatch& batch,
                                           std::vector<double> frequency = {});

// metrics.json with the summary and per_class.csv (class,f1,auc,ece,prevalence).
void write_classification_report(const std::filesystem::path& dir,
                                 const ClassificationReport& report,
                                 const std::vector<std::string>& class_names);

}  // namespace msam::metrics
