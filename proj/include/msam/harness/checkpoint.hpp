// Copyright 2026 The MSAM Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "msam/diff/params.hpp"

namespace msam::harness {

inline constexpr std::uint32_t kCheckpointVersion = 1;

struct NamedTensor {
  std::string name;
  diff::Tensor<float> value;
  bool operator==(const NamedTensor&) const = default;
};

// Little-endian layout: "MSAM", u32 version, u64 config hash, u32 metric
// count then (u32 name length, name bytes, f64 value) each, u32 tensor count
// then (u32 name length, name bytes, u32 rank, u32 dims..., f32 values) each.
struct Checkpoint {
  std::uint64_t config_hash = 0;
  std::vector<std::pair<std::string, double>> metrics;
  std::vector<NamedTensor> tensors;

  const diff::Tensor<float>& tensor(const std::string& name) const;
  bool operator==(const Checkpoint&) const = default;
};

void save_checkpoint(const std::filesystem::path& path, const Checkpoint& checkpoint);
// Parses the whole file before returning; any defect raises FormatError
// naming `path`.
Checkpoint load_checkpoint(const std::filesystem::path& path);

// Appends every tensor of `params`, with names prefixed by `prefix`.
void add_parameters(Checkpoint& checkpoint, const diff::ParameterSet<float>& params,
                    const std::string& prefix = "");
// Rebuilds a parameter set from the tensors whose names start with `prefix`.
diff::ParameterSet<float> extract_parameters(const Checkpoint& checkpoint,
                                             const std::string& prefix);

}  // namespace msam::harness
