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
#include <utility>
#include <vector>

namespace pefa {

/// (query id, passage id)
using RelevancePair = std::pair<std::uint32_t, std::uint32_t>;

/// Sparse binary query x passage matrix, stored twice: compressed rows give
/// the relevant passages of a query, compressed columns give the relevant
/// queries of a passage. Ids inside each row/column are ascending.
class RelevanceMatrix {
 public:
  RelevanceMatrix() = default;

  /// Duplicates are collapsed. Throws DataError naming the first pair with an
  /// id outside [0, n_queries) x [0, n_passages).
  static RelevanceMatrix from_pairs(std::span<const RelevancePair> pairs, std::size_t n_queries,
                                    std::size_t n_passages);

  std::size_t n_queries() const noexcept { return n_queries_; }
  std::size_t n_passages() const noexcept { return n_passages_; }
  std::size_t nnz() const noexcept { return row_ids_.size(); }

  /// Passages relevant to query i.
  std::span<const std::uint32_t> row(std::size_t i) const noexcept {
    return {row_ids_.data() + row_ptr_[i], row_ptr_[i + 1] - row_ptr_[i]};
  }
  /// Queries relevant to passage j.
  std::span<const std::uint32_t> col(std::size_t j) const noexcept {
    return {col_ids_.data() + col_ptr_[j], col_ptr_[j + 1] - col_ptr_[j]};
  }

  bool contains(std::uint32_t query, std::uint32_t passage) const noexcept;

  /// All pairs in row-major order.
  std::vector<RelevancePair> pairs() const;
  /// All pairs produced by walking the column index, re-sorted row-major.
  std::vector<RelevancePair> pairs_by_column() const;

  friend bool operator==(const RelevanceMatrix& a, const RelevanceMatrix& b) {
    return a.n_queries_ == b.n_queries_ && a.n_passages_ == b.n_passages_ &&
           a.row_ptr_ == b.row_ptr_ && a.row_ids_ == b.row_ids_;
  }

 private:
  std::size_t n_queries_ = 0;
  std::size_t n_passages_ = 0;
  std::vector<std::size_t> row_ptr_{0};
  std::vector<std::uint32_t> row_ids_;
  std::vector<std::size_t> col_ptr_{0};
  std::vector<std::uint32_t> col_ids_;
};

}  // namespace pefa
