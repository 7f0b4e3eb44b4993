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
#include <cstdint>
#include <span>
#include <vector>

namespace pefa {

/// Tolerance on |norm - 1| accepted when validating unit-norm embeddings.
inline constexpr double kUnitNormTolerance = 1e-3;

struct IngestOptions {
  /// Renormalize rows instead of rejecting rows that are not unit-norm.
  bool normalize = false;
};

/// Dense row-major f32 matrix. Holds passage embeddings, training query
/// embeddings, test queries and derived matrices (aggregated or fused rows).
///
/// Immutable after construction. Rows that are known to be all-zero (for
/// example a passage without any relevant training query) are listed in
/// zero_rows().
class EmbeddingMatrix {
 public:
  EmbeddingMatrix() = default;

  /// Throws DataError when data.size() != rows * dim or dim == 0.
  EmbeddingMatrix(std::size_t rows, std::size_t dim, std::vector<float> data,
                  std::vector<std::uint32_t> zero_rows = {});

  /// Builds a matrix from raw input and enforces the unit-norm contract:
  /// rows must satisfy |norm - 1| <= 1e-3, otherwise DataError names the row.
  /// With options.normalize every row is projected onto the unit sphere and
  /// all-zero rows are kept as zero and flagged.
  static EmbeddingMatrix ingest(std::size_t rows, std::size_t dim, std::vector<float> data,
                                IngestOptions options = {});

  std::size_t rows() const noexcept { return rows_; }
  std::size_t dim() const noexcept { return dim_; }
  bool empty() const noexcept { return rows_ == 0; }

  std::span<const float> row(std::size_t i) const noexcept {
    return {data_.data() + i * dim_, dim_};
  }
  const float* row_ptr(std::size_t i) const noexcept { return data_.data() + i * dim_; }

  std::span<const float> data() const noexcept { return data_; }
  std::span<const std::uint32_t> zero_rows() const noexcept { return zero_rows_; }

  /// Throws DataError naming the first non-flagged row whose norm is off by
  /// more than tolerance.
  void validate_unit_norm(double tolerance = kUnitNormTolerance) const;

  friend bool operator==(const EmbeddingMatrix& a, const EmbeddingMatrix& b) {
    return a.rows_ == b.rows_ && a.dim_ == b.dim_ && a.data_ == b.data_;
  }

 private:
  std::size_t rows_ = 0;
  std::size_t dim_ = 1;
  std::vector<float> data_;
  std::vector<std::uint32_t> zero_rows_;
};

}  // namespace pefa
