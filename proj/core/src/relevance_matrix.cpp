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

#include "pefa/relevance_matrix.hpp"

#include <algorithm>
#include <string>

#include "pefa/error.hpp"

namespace pefa {

RelevanceMatrix RelevanceMatrix::from_pairs(std::span<const RelevancePair> pairs,
                                            std::size_t n_queries, std::size_t n_passages) {
  for (const auto& [q, p] : pairs) {
    if (q >= n_queries || p >= n_passages) {
      throw DataError("relevance pair (" + std::to_string(q) + ", " + std::to_string(p) +
                      ") out of range for shape " + std::to_string(n_queries) + "x" +
                      std::to_string(n_passages));
    }
  }
  std::vector<RelevancePair> sorted(pairs.begin(), pairs.end());
  std::sort(sorted.begin(), sorted.end());
  sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());

  RelevanceMatrix m;
  m.n_queries_ = n_queries;
  m.n_passages_ = n_passages;

  m.row_ptr_.assign(n_queries + 1, 0);
  m.row_ids_.reserve(sorted.size());
  for (const auto& [q, p] : sorted) {
    ++m.row_ptr_[q + 1];
    m.row_ids_.push_back(p);
  }
  for (std::size_t i = 0; i < n_queries; ++i) {
    m.row_ptr_[i + 1] += m.row_ptr_[i];
  }

  // Counting sort into columns; walking rows in order keeps column ids ascending.
  m.col_ptr_.assign(n_passages + 1, 0);
  for (const auto& pair : sorted) {
    ++m.col_ptr_[pair.second + 1];
  }
  for (std::size_t j = 0; j < n_passages; ++j) {
    m.col_ptr_[j + 1] += m.col_ptr_[j];
  }
  m.col_ids_.resize(sorted.size());
  std::vector<std::size_t> cursor(m.col_ptr_.begin(), m.col_ptr_.end() - 1);
  for (const auto& [q, p] : sorted) {
    m.col_ids_[cursor[p]++] = q;
  }

  if (m.pairs() != m.pairs_by_column()) {
    throw InvariantError("relevance matrix: row and column indices disagree");
  }
  return m;
}

bool RelevanceMatrix::contains(std::uint32_t query, std::uint32_t passage) const noexcept {
  if (query >= n_queries_) {
    return false;
  }
  auto r = row(query);
  return std::binary_search(r.begin(), r.end(), passage);
}

std::vector<RelevancePair> RelevanceMatrix::pairs() const {
  std::vector<RelevancePair> out;
  out.reserve(nnz());
  for (std::size_t i = 0; i < n_queries_; ++i) {
    for (auto p : row(i)) {
      out.emplace_back(static_cast<std::uint32_t>(i), p);
    }
  }
  return out;
}

std::vector<RelevancePair> RelevanceMatrix::pairs_by_column() const {
  std::vector<RelevancePair> out;
  out.reserve(col_ids_.size());
  for (std::size_t j = 0; j < n_passages_; ++j) {
    for (auto q : col(j)) {
      out.emplace_back(q, static_cast<std::uint32_t>(j));
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace pefa
