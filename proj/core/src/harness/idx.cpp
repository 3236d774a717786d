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

#include "lae/harness/idx.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <iterator>
#include <limits>

#include "lae/common/error.hpp"
#include "lae/models/likelihood.hpp"

namespace lae::harness {

namespace {

std::vector<std::uint8_t> read_all(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw FormatError("cannot open " + path.string());
  return {std::istreambuf_iterator<char>(is), std::istreambuf_iterator<char>()};
}

std::uint32_t read_be32(const std::vector<std::uint8_t>& buf, std::size_t offset, const std::string& path) {
  if (buf.size() < offset + 4) throw FormatError(path + ": truncated IDX header");
  return (std::uint32_t{buf[offset]} << 24) | (std::uint32_t{buf[offset + 1]} << 16) |
         (std::uint32_t{buf[offset + 2]} << 8) | std::uint32_t{buf[offset + 3]};
}

void put_be32(std::ostream& os, std::uint32_t v) {
  const char bytes[4] = {static_cast<char>(v >> 24), static_cast<char>(v >> 16), static_cast<char>(v >> 8),
                         static_cast<char>(v)};
  os.write(bytes, 4);
}

void check_magic(std::uint32_t magic, std::uint32_t expected, const std::string& path) {
  if (magic != expected) {
    char buf[96];
    std::snprintf(buf, sizeof buf, "%s: bad IDX magic 0x%08x (expected 0x%08x)", path.c_str(), magic, expected);
    throw FormatError(buf);
  }
}

}  // namespace

IdxImages load_idx_images(const std::filesystem::path& path) {
  const std::string name = path.string();
  const auto buf = read_all(path);
  check_magic(read_be32(buf, 0, name), kIdxImageMagic, name);
  IdxImages out;
  out.count = read_be32(buf, 4, name);
  out.rows = read_be32(buf, 8, name);
  out.cols = read_be32(buf, 12, name);
  constexpr std::size_t kMax = std::numeric_limits<std::size_t>::max();
  if (out.rows != 0 && out.cols > kMax / out.rows) throw FormatError(name + ": IDX dimensions overflow");
  const std::size_t per = out.rows * out.cols;
  if (per != 0 && out.count > (kMax - 16) / per) throw FormatError(name + ": IDX dimensions overflow");
  const std::size_t body = out.count * per;
  if (buf.size() < 16 + body) {
    throw FormatError(name + ": truncated IDX body (" + std::to_string(buf.size() - 16) + " of " +
                      std::to_string(body) + " bytes)");
  }
  out.pixels.assign(buf.begin() + 16, buf.begin() + 16 + static_cast<std::ptrdiff_t>(body));
  return out;
}

std::vector<std::uint8_t> load_idx_labels(const std::filesystem::path& path) {
  const std::string name = path.string();
  const auto buf = read_all(path);
  check_magic(read_be32(buf, 0, name), kIdxLabelMagic, name);
  const std::size_t count = read_be32(buf, 4, name);
  if (buf.size() < 8 + count) throw FormatError(name + ": truncated IDX body");
  return {buf.begin() + 8, buf.begin() + 8 + static_cast<std::ptrdiff_t>(count)};
}

void write_idx_images(const std::filesystem::path& path, const IdxImages& images) {
  if (images.pixels.size() != images.count * images.pixels_per_image()) {
    throw DimensionError("IDX images: pixel count does not match dimensions");
  }
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw FormatError("cannot open " + path.string() + " for writing");
  put_be32(os, kIdxImageMagic);
  put_be32(os, static_cast<std::uint32_t>(images.count));
  put_be32(os, static_cast<std::uint32_t>(images.rows));
  put_be32(os, static_cast<std::uint32_t>(images.cols));
  os.write(reinterpret_cast<const char*>(images.pixels.data()), static_cast<std::streamsize>(images.pixels.size()));
}

void write_idx_labels(const std::filesystem::path& path, const std::vector<std::uint8_t>& labels) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw FormatError("cannot open " + path.string() + " for writing");
  put_be32(os, kIdxLabelMagic);
  put_be32(os, static_cast<std::uint32_t>(labels.size()));
  os.write(reinterpret_cast<const char*>(labels.data()), static_cast<std::streamsize>(labels.size()));
}

Matrix to_unit_matrix(const IdxImages& images, std::size_t first, std::size_t count) {
  if (first > images.count) throw DimensionError("image range starts past the end of the dataset");
  count = std::min(count, images.count - first);
  const std::size_t per = images.pixels_per_image();
  Matrix out(static_cast<Eigen::Index>(count), static_cast<Eigen::Index>(per));
  for (std::size_t i = 0; i < count; ++i) {
    for (std::size_t p = 0; p < per; ++p) {
      out(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(p)) =
          models::pixel_to_unit(images.pixels[(first + i) * per + p]);
    }
  }
  return out;
}

}  // namespace lae::harness
