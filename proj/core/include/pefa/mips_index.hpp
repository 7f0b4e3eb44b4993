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
#include <memory>
#include <span>

#include "pefa/embedding_matrix.hpp"
#include "pefa/scored_list.hpp"

namespace pefa {

/// Top-k maximum inner product search over a fixed database. Implementations
/// are immutable and safe for concurrent searches.
class MipsIndex {
 public:
  virtual ~MipsIndex() = default;

  /// Returns at most topk entries whose scores are the exact inner products
  /// of the query with the returned rows. ef is the search beam width; an
  /// exhaustive index ignores it.
  virtual ScoredList search(std::span<const float> query, std::size_t topk,
                            std::size_t ef) const = 0;

  virtual const EmbeddingMatrix& vectors() const noexcept = 0;

  std::size_t size() const noexcept { return vectors().rows(); }
  std::size_t dim() const noexcept { return vectors().dim(); }
};

/// Exhaustive scan. Used as the exact backend of the fusion pipeline and as a
/// baseline; it shares the scoring kernel of the approximate index.
class FlatIndex final : public MipsIndex {
 public:
  explicit FlatIndex(std::shared_ptr<const EmbeddingMatrix> vectors);

  ScoredList search(std::span<const float> query, std::size_t topk,
                    std::size_t ef = 0) const override;

  const EmbeddingMatrix& vectors() const noexcept override { return *vectors_; }

 private:
  std::shared_ptr<const EmbeddingMatrix> vectors_;
};

}  // namespace pefa
