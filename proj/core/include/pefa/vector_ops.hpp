// Copyright 2026 The PEFA Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace pefa {

/// Norms at or below this value are treated as the zero vector.
inline constexpr double kZeroNormThreshold = 1e-12;

/// Inner product accumulated in f64 (four fixed lanes), rounded to f32 once.
/// Throws UsageError on dimension mismatch.
float dot(std::span<const float> u, std::span<const float> v);

/// Euclidean norm, f64 accumulation.
double l2_norm(std::span<const float> v);

struct NormalizedVector {
  std::vector<float> values;
  bool was_zero = false;
};

/// Projects v onto the unit sphere. A vector with norm <= 1e-12 maps to the
/// zero vector with was_zero set instead of failing.
NormalizedVector l2_normalize(std::span<const float> v);

namespace detail {

// Hot-path inner product without the dimension check. Same arithmetic as
// dot(): products in f64 summed into four lanes by index modulo 4, lanes
// combined as (l0 + l1) + (l2 + l3), single rounding to f32.
inline float dot_unchecked(const float* a, const float* b, std::size_t dim) {
  double lane[4] = {0.0, 0.0, 0.0, 0.0};
  std::size_t i = 0;
  for (; i + 4 <= dim; i += 4) {
    lane[0] += static_cast<double>(a[i]) * static_cast<double>(b[i]);
    lane[1] += static_cast<double>(a[i + 1]) * static_cast<double>(b[i + 1]);
    lane[2] += static_cast<double>(a[i + 2]) * static_cast<double>(b[i + 2]);
    lane[3] += static_cast<double>(a[i + 3]) * static_cast<double>(b[i + 3]);
  }
  for (; i < dim; ++i) {
    lane[i % 4] += static_cast<double>(a[i]) * static_cast<double>(b[i]);
  }
  return static_cast<float>((lane[0] + lane[1]) + (lane[2] + lane[3]));
}

}  // namespace detail
}  // namespace pefa
