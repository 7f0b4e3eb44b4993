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

#include "pefa/embedding_matrix.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "pefa/error.hpp"
#include "pefa/vector_ops.hpp"

namespace pefa {

EmbeddingMatrix::EmbeddingMatrix(std::size_t rows, std::size_t dim, std::vector<float> data,
                                 std::vector<std::uint32_t> zero_rows)
    : rows_(rows), dim_(dim), data_(std::move(data)), zero_rows_(std::move(zero_rows)) {
  if (dim_ == 0) {
    throw DataError("embedding matrix: dim must be >= 1");
  }
  if (data_.size() != rows_ * dim_) {
    throw DataError("embedding matrix: expected " + std::to_string(rows_ * dim_) +
                    " values for " + std::to_string(rows_) + "x" + std::to_string(dim_) +
                    ", got " + std::to_string(data_.size()));
  }
  std::sort(zero_rows_.begin(), zero_rows_.end());
  zero_rows_.erase(std::unique(zero_rows_.begin(), zero_rows_.end()), zero_rows_.end());
  if (!zero_rows_.empty() && zero_rows_.back() >= rows_) {
    throw DataError("embedding matrix: zero-row flag out of range");
  }
}

EmbeddingMatrix EmbeddingMatrix::ingest(std::size_t rows, std::size_t dim,
                                        std::vector<float> data, IngestOptions options) {
  if (!options.normalize) {
    EmbeddingMatrix m(rows, dim, std::move(data));
    m.validate_unit_norm();
    return m;
  }
  if (dim == 0 || data.size() != rows * dim) {
    // Delegate the error message to the constructor.
    return EmbeddingMatrix(rows, dim, std::move(data));
  }
  std::vector<std::uint32_t> zero_rows;
  for (std::size_t i = 0; i < rows; ++i) {
    std::span<float> r(data.data() + i * dim, dim);
    auto unit = l2_normalize(r);
    if (unit.was_zero) {
      zero_rows.push_back(static_cast<std::uint32_t>(i));
    }
    std::copy(unit.values.begin(), unit.values.end(), r.begin());
  }
  return EmbeddingMatrix(rows, dim, std::move(data), std::move(zero_rows));
}

void EmbeddingMatrix::validate_unit_norm(double tolerance) const {
  auto flagged = zero_rows_.begin();
  for (std::size_t i = 0; i < rows_; ++i) {
    if (flagged != zero_rows_.end() && *flagged == i) {
      ++flagged;
      continue;
    }
    const double norm = l2_norm(row(i));
    if (!(std::abs(norm - 1.0) <= tolerance)) {
      throw DataError("embedding row " + std::to_string(i) + " has norm " +
                      std::to_string(norm) + ", expected unit norm (tolerance " +
                      std::to_string(tolerance) + "); pass --normalize to renormalize");
    }
  }
}

}  // namespace pefa
