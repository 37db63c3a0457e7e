// Copyright 2026 The MSAM Authors.
// SPDX-License-Identifier: Apache-2.0

#include "msam/metrics/report.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <json.hpp>

#include "msam/error.hpp"

namespace msam::metrics {

ClassificationReport classification_report(const EvalBatch& batch,
                                           std::vector<double> frequency) {
  batch.validate();
  ClassificationReport r;
  r.prevalence.assign(batch.classes, 0.0);
  for (std::size_t i = 0; i < batch.docs; ++i) {
    for (std::size_t l = 0; l < batch.classes; ++l) r.prevalence[l] += batch.is_gold(i, l) ? 1.0 : 0.0;
  }
  for (double& p : r.prevalence) p /= static_cast<double>(batch.docs);
  if (frequency.empty()) frequency = r.prevalence;

  const auto f1 = f1_scores(batch);
  r.f1 = per_class_f1(batch);
  r.auc = per_class_auc(batch);
  const auto cal = mece(batch);
  r.ece = cal.per_class;
  const int n = static_cast<int>(std::min<std::size_t>(5, batch.classes));

  auto& s = r.summary;
  s["micro_f1"] = f1.micro;
  s["macro_f1"] = f1.macro;
  s[fmt::format("precision_at_{}", n)] = precision_at_n(batch, n);
  s["mece"] = cal.mean;
  if (std::any_of(r.auc.begin(), r.auc.end(), [](double a) { return !std::isnan(a); })) {
    const auto auc = auc_scores(batch);
    s["micro_auc"] = auc.micro;
    s["macro_auc"] = auc.macro;
  }
  const auto ece_bands = frequency_bands(r.ece, frequency);
  s["mece_low"] = ece_bands.low;
  s["mece_medium"] = ece_bands.medium;
  s["mece_high"] = ece_bands.high;
  const auto f1_bands = frequency_bands(r.f1, frequency);
  s["f1_low"] = f1_bands.low;
  s["f1_medium"] = f1_bands.medium;
  s["f1_high"] = f1_bands.high;
  s["documents"] = static_cast<double>(batch.docs);
  return r;
}

void write_classification_report(const std::filesystem::path& dir,
                                 const ClassificationReport& report,
                                 const std::vector<std::string>& class_names) {
  if (class_names.size() != report.f1.size()) {
    throw DimensionError("report: class names do not match the class count");
  }
  std::filesystem::create_directories(dir);
  {
    std::ofstream out(dir / "metrics.json");
    if (!out) throw Error(fmt::format("cannot write {}", (dir / "metrics.json").string()));
    out << nlohmann::json(report.summary).dump(2) << '\n';
  }
  std::ofstream csv(dir / "per_class.csv");
  if (!csv) throw Error(fmt::format("cannot write {}", (dir / "per_class.csv").string()));
  csv << "class,f1,auc,ece,prevalence\n";
  for (std::size_t l = 0; l < class_names.size(); ++l) {
    csv << fmt::format("{},{:.6f},{},{:.6f},{:.6f}\n", class_names[l], report.f1[l],
                       std::isnan(report.auc[l]) ? std::string("") : fmt::format("{:.6f}", report.auc[l]),
                       report.ece[l], report.prevalence[l]);
  }
}

}  // namespace msam::metrics
