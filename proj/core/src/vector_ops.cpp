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

#include "pefa/vector_ops.hpp"

#include <cmath>
#include <string>

#include "pefa/error.hpp"

namespace pefa {

float dot(std::span<const float> u, std::span<const float> v) {
  if (u.size() != v.size()) {
    throw UsageError("dot: dimension mismatch (" + std::to_string(u.size()) + " vs " +
                     std::to_string(v.size()) + ")");
  }
  return detail::dot_unchecked(u.data(), v.data(), u.size());
}

double l2_norm(std::span<const float> v) {
  double acc = 0.0;
  for (float x : v) {
    acc += static_cast<double>(x) * static_cast<double>(x);
  }
  return std::sqrt(acc);
}

NormalizedVector l2_normalize(std::span<const float> v) {
  NormalizedVector out;
  out.values.assign(v.size(), 0.0f);
  const double norm = l2_norm(v);
  if (!(norm > kZeroNormThreshold)) {
    out.was_zero = true;
    return out;
  }
  for (std::size_t i = 0; i < v.size(); ++i) {
    out.values[i] = static_cast<float>(static_cast<double>(v[i]) / norm);
  }
  return out;
}

}  // namespace pefa
