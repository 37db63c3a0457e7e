// Copyright 2026 The MSAM Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string>
#include <vector>

#include "msam/diff/params.hpp"
#include "msam/text/document.hpp"

namespace msam::model {

using diff::Graph;
using diff::ParamBinding;
using diff::ParameterSet;
using diff::Tensor;
using diff::Var;

// A multi-label document classifier producing one logit per code.
template <typename T>
class Classifier {
 public:
  virtual ~Classifier() = default;

  // 1 x L logits for `doc`, recorded on bind.graph().
  virtual Var forward(ParamBinding<T>& bind, const text::Document& doc) const = 0;
  virtual int num_codes() const = 0;
  virtual std::string kind() const = 0;

  ParameterSet<T>& params() { return params_; }
  const ParameterSet<T>& params() const { return params_; }

  // Sigmoid of forward() evaluated without keeping the graph.
  std::vector<T> predict(const text::Document& doc) const;

 protected:
  Classifier() = default;
  explicit Classifier(ParameterSet<T> params) : params_(std::move(params)) {}

  ParameterSet<T> params_;
};

extern template class Classifier<float>;
extern template class Classifier<double>;

}  // namespace msam::model
