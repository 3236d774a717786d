// Copyright 2026 The LAE Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "lae/models/checkpoint.hpp"

#include <algorithm>
#include <bit>
#include <cstring>
#include <fstream>
#include <map>

#include "lae/common/error.hpp"

namespace lae::models {

namespace {

template <typename T>
void put(std::ostream& os, T value) {
  unsigned char bytes[sizeof(T)];
  std::memcpy(bytes, &value, sizeof(T));
  if constexpr (std::endian::native == std::endian::big) std::reverse(bytes, bytes + sizeof(T));
  os.write(reinterpret_cast<const char*>(bytes), sizeof(T));
}

template <typename T>
T get(std::istream& is, const char* what) {
  unsigned char bytes[sizeof(T)];
  if (!is.read(reinterpret_cast<char*>(bytes), sizeof(T))) {
    throw FormatError(std::string("checkpoint truncated while reading ") + what);
  }
  if constexpr (std::endian::native == std::endian::big) std::reverse(bytes, bytes + sizeof(T));
  T value;
  std::memcpy(&value, bytes, sizeof(T));
  return value;
}

}  // namespace

void save_checkpoint(const std::filesystem::path& path, std::span<const ad::NamedTensor> tensors) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw FormatError("cannot open " + path.string() + " for writing");
  for (const auto& [name, tensor] : tensors) {
    put<std::uint32_t>(os, static_cast<std::uint32_t>(name.size()));
    os.write(name.data(), static_cast<std::streamsize>(name.size()));
    put<std::uint32_t>(os, static_cast<std::uint32_t>(tensor.rank()));
    for (std::size_t dim : tensor.shape()) put<std::uint64_t>(os, dim);
    for (double v : tensor.values()) put<double>(os, v);
  }
  if (!os) throw FormatError("write failed for " + path.string());
}

std::vector<TensorRecord> load_checkpoint(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw FormatError("cannot open checkpoint " + path.string());
  std::vector<TensorRecord> records;
  while (is.peek() != std::char_traits<char>::eof()) {
    TensorRecord rec;
    const auto name_len = get<std::uint32_t>(is, "name length");
    if (name_len > (1u << 20)) throw FormatError("implausible tensor name length");
    rec.name.resize(name_len);
    if (!is.read(rec.name.data(), name_len)) throw FormatError("checkpoint truncated in name");
    const auto rank = get<std::uint32_t>(is, "rank");
    if (rank > 2) throw FormatError("tensor '" + rec.name + "' has unsupported rank");
    std::uint64_t count = 1;
    for (std::uint32_t r = 0; r < rank; ++r) {
      const auto dim = get<std::uint64_t>(is, "dimension");
      if (dim != 0 && count > (std::uint64_t{1} << 40) / dim) {
        throw FormatError("tensor '" + rec.name + "' is too large");
      }
      count *= dim;
      rec.shape.push_back(static_cast<std::size_t>(dim));
    }
    rec.values.resize(static_cast<std::size_t>(count));
    for (double& v : rec.values) v = get<double>(is, "values");
    records.push_back(std::move(rec));
  }
  return records;
}

void restore_checkpoint(const std::filesystem::path& path, std::span<const ad::NamedTensor> tensors) {
  std::map<std::string, TensorRecord> by_name;
  for (auto& rec : load_checkpoint(path)) by_name.emplace(rec.name, std::move(rec));
  for (const auto& [name, tensor] : tensors) {
    auto it = by_name.find(name);
    if (it == by_name.end()) throw FormatError("checkpoint has no tensor named '" + name + "'");
    if (it->second.shape != tensor.shape()) {
      throw FormatError("tensor '" + name + "' has shape " + ad::shape_string(it->second.shape) +
                        " in checkpoint, expected " + ad::shape_string(tensor.shape()));
    }
    ad::Tensor target = tensor;
    auto dst = target.mutable_values();
    std::copy(it->second.values.begin(), it->second.values.end(), dst.begin());
  }
}

}  // namespace lae::models
