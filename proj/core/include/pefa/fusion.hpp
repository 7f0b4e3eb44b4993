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
#include <vector>

#include "pefa/embedding_matrix.hpp"
#include "pefa/hnsw_index.hpp"
#include "pefa/mips_index.hpp"
#include "pefa/relevance_matrix.hpp"
#include "pefa/scored_list.hpp"

// Parameter-free adaptation of an embedding retrieval model: the model's
// inner-product score is interpolated with a non-parametric kNN score built
// from training (query, passage) pairs.
//
//   fused(q, j) = lambda * <q, p_j> + (1 - lambda) * knn(q, j)
//
// Two realizations:
//   * XS precomputes the kNN side into the passage embeddings and needs a
//     single index (lambda fixed at build time).
//   * XL keeps a second index over training queries and sums similarity
//     weighted votes of the k nearest ones at query time.
namespace pefa {

inline constexpr std::size_t kDefaultCandidateBudget = 300;

struct FusionConfig {
  float lambda = 0.5f;
  /// Number of nearest training queries; each contributes with weight 1/k.
  std::size_t k = 32;
  /// Fan-out of the passage-side ANN search. 0 selects max(topk, 300).
  std::size_t candidate_budget = 0;
  std::size_t ef_search = 300;

  std::size_t effective_budget(std::size_t topk) const noexcept;
  /// Throws UsageError on lambda outside [0, 1], k == 0, or an explicit
  /// budget below topk.
  void validate(std::size_t topk) const;
};

/// Row j is the normalized sum of the training queries relevant to passage j.
/// Passages without any relevant query get a zero row, listed in zero_rows().
EmbeddingMatrix pifa_aggregate(const EmbeddingMatrix& train_queries, const RelevanceMatrix& y);

/// Row j is lambda * p_j + (1 - lambda) * pifa_j. Rows are not renormalized,
/// so <q, row_j> is exactly the fused score. lambda == 1 reproduces P.
EmbeddingMatrix build_xs_embeddings(const EmbeddingMatrix& passages,
                                    const EmbeddingMatrix& train_queries,
                                    const RelevanceMatrix& y, float lambda);

struct XsIndex {
  HnswIndex index;
  float lambda = 1.0f;
  std::size_t zero_rows = 0;
};

XsIndex build_xs_index(const EmbeddingMatrix& passages, const EmbeddingMatrix& train_queries,
                       const RelevanceMatrix& y, float lambda, const HnswParams& params);

/// Offline artifact of the dual-index scheme. Either side may be an HNSW
/// graph or an exhaustive FlatIndex.
class XlIndexPair {
 public:
  /// Throws UsageError when dims differ or the relevance shape does not match
  /// (training queries x passages).
  XlIndexPair(std::shared_ptr<const MipsIndex> passage_index,
              std::shared_ptr<const MipsIndex> query_index, RelevanceMatrix relevance);

  const MipsIndex& passage_index() const noexcept { return *passage_index_; }
  const MipsIndex& query_index() const noexcept { return *query_index_; }
  const std::shared_ptr<const MipsIndex>& shared_passage_index() const noexcept {
    return passage_index_;
  }
  const std::shared_ptr<const MipsIndex>& shared_query_index() const noexcept {
    return query_index_;
  }
  const RelevanceMatrix& relevance() const noexcept { return relevance_; }
  const EmbeddingMatrix& passages() const noexcept { return passage_index_->vectors(); }
  std::size_t n_train_queries() const noexcept { return query_index_->size(); }

 private:
  std::shared_ptr<const MipsIndex> passage_index_;
  std::shared_ptr<const MipsIndex> query_index_;
  RelevanceMatrix relevance_;
};

/// Online fusion:
///   1. k nearest training queries N from the query index;
///   2. knn_j = (1/k) * sum_{i in N, Y_ij = 1} <q, q_i>;
///   3. candidates = passage ANN top-budget  U  every passage relevant to some i in N;
///   4. exact fused score for every candidate from the stored passage rows;
///   5. best topk under (-score, id).
/// With lambda == 1 the kNN term vanishes and the call is exactly the plain
/// passage index search (topk, ef_search).
/// Throws UsageError when cfg.k exceeds the number of training queries.
ScoredList xl_search(std::span<const float> query, const XlIndexPair& index,
                     const FusionConfig& cfg, std::size_t topk);

/// Batch helpers; one result per query row, parallel over queries.
std::vector<ScoredList> xl_search_batch(const EmbeddingMatrix& queries, const XlIndexPair& index,
                                        const FusionConfig& cfg, std::size_t topk,
                                        std::size_t threads = 0);
std::vector<ScoredList> search_batch(const MipsIndex& index, const EmbeddingMatrix& queries,
                                     std::size_t topk, std::size_t ef, std::size_t threads = 0);

}  // namespace pefa
