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

#include <cstdint>
#include <filesystem>
#include <vector>

#include "lae/common/types.hpp"

namespace lae::harness {

inline constexpr std::uint32_t kIdxImageMagic = 0x00000803;
inline constexpr std::uint32_t kIdxLabelMagic = 0x00000801;

struct IdxImages {
  std::size_t count = 0;
  std::size_t rows = 0;
  std::size_t cols = 0;
  /// Row-major pixels, image after image.
  std::vector<std::uint8_t> pixels;

  std::size_t pixels_per_image() const { return rows * cols; }
  std::uint8_t at(std::size_t image, std::size_t r, std::size_t c) const {
    return pixels[image * rows * cols + r * cols + c];
  }
};

/// Parse an IDX3 unsigned-byte image file. Throws FormatError for a wrong
/// magic number, a truncated body or dimensions whose product overflows.
IdxImages load_idx_images(const std::filesystem::path& path);
std::vector<std::uint8_t> load_idx_labels(const std::filesystem::path& path);

void write_idx_images(const std::filesystem::path& path, const IdxImages& images);
void write_idx_labels(const std::filesystem::path& path, const std::vector<std::uint8_t>& labels);

/// One image per row, pixels mapped to 2 v / 255 - 1.
Matrix to_unit_matrix(const IdxImages& images, std::size_t first = 0,
                      std::size_t count = static_cast<std::size_t>(-1));

}  // namespace lae::harness
