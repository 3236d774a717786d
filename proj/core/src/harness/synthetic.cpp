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

#include "lae/harness/synthetic.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>

#include "lae/common/rng.hpp"

namespace lae::harness {

namespace {

struct Point {
  double x, y;
};
using Stroke = std::vector<Point>;

Stroke ellipse(double cx, double cy, double rx, double ry, int segments = 16) {
  Stroke s;
  for (int k = 0; k <= segments; ++k) {
    const double a = 2.0 * std::numbers::pi * k / segments;
    s.push_back({cx + rx * std::cos(a), cy + ry * std::sin(a)});
  }
  return s;
}

std::vector<Stroke> skeleton(int digit) {
  switch (digit) {
    case 0: return {ellipse(0.5, 0.5, 0.28, 0.42)};
    case 1: return {{{0.36, 0.24}, {0.52, 0.1}, {0.52, 0.9}}};
    case 2: return {{{0.25, 0.3}, {0.35, 0.13}, {0.55, 0.1}, {0.72, 0.2}, {0.72, 0.38}, {0.25, 0.9}, {0.8, 0.9}}};
    case 3: return {{{0.25, 0.15}, {0.6, 0.1}, {0.72, 0.25}, {0.48, 0.48}, {0.74, 0.64}, {0.65, 0.88}, {0.25, 0.88}}};
    case 4: return {{{0.66, 0.9}, {0.66, 0.1}, {0.2, 0.65}, {0.82, 0.65}}};
    case 5: return {{{0.76, 0.1}, {0.32, 0.1}, {0.28, 0.45}, {0.6, 0.42}, {0.76, 0.6}, {0.66, 0.86}, {0.25, 0.88}}};
    case 6:
      return {{{0.7, 0.12}, {0.42, 0.28}, {0.28, 0.58}, {0.34, 0.84}, {0.58, 0.9}, {0.73, 0.72}, {0.56, 0.52}, {0.3, 0.6}}};
    case 7: return {{{0.2, 0.1}, {0.8, 0.1}, {0.42, 0.9}}};
    case 8: return {ellipse(0.5, 0.29, 0.2, 0.19), ellipse(0.5, 0.7, 0.25, 0.21)};
    default: return {ellipse(0.5, 0.32, 0.22, 0.22), {{0.72, 0.32}, {0.62, 0.9}}};
  }
}

double segment_distance(double px, double py, const Point& a, const Point& b) {
  const double dx = b.x - a.x, dy = b.y - a.y;
  const double len2 = dx * dx + dy * dy;
  double t = len2 > 0.0 ? ((px - a.x) * dx + (py - a.y) * dy) / len2 : 0.0;
  t = std::clamp(t, 0.0, 1.0);
  const double ex = a.x + t * dx - px, ey = a.y + t * dy - py;
  return std::sqrt(ex * ex + ey * ey);
}

constexpr std::size_t kSide = 28;

void render(int digit, Rng& rng, std::uint8_t* out) {
  auto strokes = skeleton(digit);
  const double angle = 0.25 * (2.0 * rng.uniform() - 1.0);
  const double shear = 0.2 * (2.0 * rng.uniform() - 1.0);
  const double sx = 0.85 + 0.25 * rng.uniform(), sy = 0.85 + 0.25 * rng.uniform();
  const double tx = 0.06 * (2.0 * rng.uniform() - 1.0), ty = 0.06 * (2.0 * rng.uniform() - 1.0);
  const double pen = 1.3 + 1.1 * rng.uniform();
  const double c = std::cos(angle), s = std::sin(angle);
  for (auto& stroke : strokes) {
    for (auto& p : stroke) {
      const double jx = p.x + 0.02 * rng.normal() - 0.5, jy = p.y + 0.02 * rng.normal() - 0.5;
      const double hx = sx * (jx + shear * jy), hy = sy * jy;
      // Glyph box of 20 pixels centred in the 28 pixel canvas.
      p.x = 14.0 + 20.0 * (c * hx - s * hy + tx);
      p.y = 14.0 + 20.0 * (s * hx + c * hy + ty);
    }
  }
  for (std::size_t r = 0; r < kSide; ++r) {
    for (std::size_t col = 0; col < kSide; ++col) {
      const double px = static_cast<double>(col) + 0.5, py = static_cast<double>(r) + 0.5;
      double d = 1e9;
      for (const auto& stroke : strokes) {
        for (std::size_t k = 0; k + 1 < stroke.size(); ++k) d = std::min(d, segment_distance(px, py, stroke[k], stroke[k + 1]));
      }
      const double v = std::clamp(pen / 2.0 + 0.5 - d, 0.0, 1.0);
      out[r * kSide + col] = static_cast<std::uint8_t>(std::lround(255.0 * v));
    }
  }
}

}  // namespace

IdxImages synthetic_digits(std::size_t count, std::uint64_t seed, std::vector<std::uint8_t>* labels) {
  Rng rng(seed);
  IdxImages out;
  out.count = count;
  out.rows = kSide;
  out.cols = kSide;
  out.pixels.assign(count * kSide * kSide, 0);
  if (labels) labels->assign(count, 0);
  for (std::size_t i = 0; i < count; ++i) {
    const int digit = static_cast<int>(rng.below(10));
    if (labels) (*labels)[i] = static_cast<std::uint8_t>(digit);
    render(digit, rng, out.pixels.data() + i * kSide * kSide);
  }
  return out;
}

}  // namespace lae::harness
