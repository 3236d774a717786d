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

#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "lae/autodiff/tensor.hpp"

namespace lae::models {

/// One record of a checkpoint file.
struct TensorRecord {
  std::string name;
  ad::Shape shape;
  std::vector<double> values;
};

// A checkpoint is a flat sequence of records, each laid out as
//   u32 name length | name bytes | u32 rank | u64 dims[rank] | f64 values[]
// with every integer and float stored little-endian. There is no header.

void save_checkpoint(const std::filesystem::path& path, std::span<const ad::NamedTensor> tensors);
std::vector<TensorRecord> load_checkpoint(const std::filesystem::path& path);

/// Copy values from `path` into the matching named tensors. Throws
/// FormatError if a name is missing or a shape disagrees.
void restore_checkpoint(const std::filesystem::path& path, std::span<const ad::NamedTensor> tensors);

}  // namespace lae::models
