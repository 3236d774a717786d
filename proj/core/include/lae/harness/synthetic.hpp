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
#include <vector>

#include "lae/harness/idx.hpp"

namespace lae::harness {

/// Procedurally drawn 28 x 28 handwritten-style digits: each image is a
/// randomly warped stroke skeleton of one of the ten digits, rendered with
/// anti-aliased pen strokes on a black background.
IdxImages synthetic_digits(std::size_t count, std::uint64_t seed, std::vector<std::uint8_t>* labels = nullptr);

}  // namespace lae::harness
