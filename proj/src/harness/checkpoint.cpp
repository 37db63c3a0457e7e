// Copyright 2026 The MSAM Authors.
// SPDX-License-Identifier: Apache-2.0

#include "msam/harness/checkpoint.hpp"

#include <fmt/format.h>

#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>

#include "msam/error.hpp"

namespace msam::harness {

static_assert(std::endian::native == std::endian::little,
              "checkpoint I/O assumes a little-endian host");

namespace {

constexpr char kMagic[4] = {'M', 'S', 'A', 'M'};

class Writer {
 public:
  template <typename V>
  void put(V v) {
    const auto* p = reinterpret_cast<const char*>(&v);
    bytes_.insert(bytes_.end(), p, p + sizeof(V));
  }
  void put_string(const std::string& s) {
    put(static_cast<std::uint32_t>(s.size()));
    bytes_.insert(bytes_.end(), s.begin(), s.end());
  }
  void put_raw(const void* data, std::size_t n) {
    const auto* p = static_cast<const char*>(data);
    bytes_.insert(bytes_.end(), p, p + n);
  }
  const std::vector<char>& bytes() const { return bytes_; }

 private:
  std::vector<char> bytes_;
};

class Reader {
 public:
  Reader(std::vector<char> bytes, std::string origin)
      : bytes_(std::move(bytes)), origin_(std::move(origin)) {}

  template <typename V>
  V get(const char* what) {
    V v;
    take(&v, sizeof(V), what);
    return v;
  }
  std::string get_string(const char* what) {
    const auto n = get<std::uint32_t>(what);
    std::string s(n, '\0');
    take(s.data(), n, what);
    return s;
  }
  void take(void* out, std::size_t n, const char* what) {
    if (bytes_.size() - pos_ < n) {
      fail(fmt::format("truncated while reading {} at byte {}", what, pos_));
    }
    std::memcpy(out, bytes_.data() + pos_, n);
    pos_ += n;
  }
  bool done() const { return pos_ == bytes_.size(); }
  [[noreturn]] void fail(const std::string& detail) const {
    throw FormatError(fmt::format("checkpoint {}: {}", origin_, detail));
  }

 private:
  std::vector<char> bytes_;
  std::size_t pos_ = 0;
  std::string origin_;
};

}  // namespace

const diff::Tensor<float>& Checkpoint::tensor(const std::string& name) const {
  for (const auto& t : tensors) {
    if (t.name == name) return t.value;
  }
  throw Error(fmt::format("checkpoint has no tensor '{}'", name));
}

void save_checkpoint(const std::filesystem::path& path, const Checkpoint& checkpoint) {
  Writer w;
  w.put_raw(kMagic, sizeof kMagic);
  w.put(kCheckpointVersion);
  w.put(checkpoint.config_hash);
  w.put(static_cast<std::uint32_t>(checkpoint.metrics.size()));
  for (const auto& [name, value] : checkpoint.metrics) {
    w.put_string(name);
    w.put(value);
  }
  w.put(static_cast<std::uint32_t>(checkpoint.tensors.size()));
  for (const auto& t : checkpoint.tensors) {
    w.put_string(t.name);
    w.put(static_cast<std::uint32_t>(t.value.dims().size()));
    for (auto d : t.value.dims()) w.put(static_cast<std::uint32_t>(d));
    w.put_raw(t.value.data().data(), t.value.size() * sizeof(float));
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(fmt::format("cannot write checkpoint {}", path.string()));
  out.write(w.bytes().data(), static_cast<std::streamsize>(w.bytes().size()));
  if (!out) throw Error(fmt::format("failed writing checkpoint {}", path.string()));
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(fmt::format("cannot read checkpoint {}", path.string()));
  Reader r(std::vector<char>(std::istreambuf_iterator<char>(in), {}), path.string());

  char magic[4];
  r.take(magic, sizeof magic, "magic");
  if (std::memcmp(magic, kMagic, sizeof magic) != 0) r.fail("bad magic (not an MSAM checkpoint)");
  const auto version = r.get<std::uint32_t>("version");
  if (version != kCheckpointVersion) {
    r.fail(fmt::format("format version {} is not supported (expected {})", version,
                       kCheckpointVersion));
  }
  Checkpoint ck;
  ck.config_hash = r.get<std::uint64_t>("config hash");
  const auto n_metrics = r.get<std::uint32_t>("metric count");
  for (std::uint32_t i = 0; i < n_metrics; ++i) {
    auto name = r.get_string("metric name");
    ck.metrics.emplace_back(std::move(name), r.get<double>("metric value"));
  }
  const auto n_tensors = r.get<std::uint32_t>("tensor count");
  for (std::uint32_t i = 0; i < n_tensors; ++i) {
    NamedTensor t;
    t.name = r.get_string("tensor name");
    const auto rank = r.get<std::uint32_t>("tensor rank");
    if (rank == 0 || rank > 8) r.fail(fmt::format("tensor '{}' has unsupported rank {}", t.name, rank));
    diff::Dims dims;
    std::size_t count = 1;
    for (std::uint32_t k = 0; k < rank; ++k) {
      const auto d = r.get<std::uint32_t>("tensor dims");
      if (d == 0) r.fail(fmt::format("tensor '{}' has a zero dimension", t.name));
      dims.push_back(d);
      count *= d;
    }
    std::vector<float> data(count);
    r.take(data.data(), count * sizeof(float), "tensor values");
    t.value = diff::Tensor<float>(std::move(dims), std::move(data));
    ck.tensors.push_back(std::move(t));
  }
  if (!r.done()) r.fail("trailing bytes after the tensor table");
  return ck;
}

void add_parameters(Checkpoint& checkpoint, const diff::ParameterSet<float>& params,
                    const std::string& prefix) {
  for (std::size_t i = 0; i < params.size(); ++i) {
    checkpoint.tensors.push_back({prefix + params.name(i), params[i]});
  }
}

diff::ParameterSet<float> extract_parameters(const Checkpoint& checkpoint,
                                             const std::string& prefix) {
  diff::ParameterSet<float> params;
  for (const auto& t : checkpoint.tensors) {
    if (t.name.starts_with(prefix)) params.add(t.name.substr(prefix.size()), t.value);
  }
  return params;
}

}  // namespace msam::harness
