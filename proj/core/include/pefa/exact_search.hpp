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

#include "pefa/embedding_matrix.hpp"
#include "pefa/relevance_matrix.hpp"
#include "pefa/scored_list.hpp"

// Brute-force reference implementations. Nothing in here calls into the
// indexing or fusion code paths, so equivalence tests between the two are
// meaningful. Everything is O(n * d) per query.
namespace pefa::exact {

/// Exact top-k by full scan under (-score, id) ordering.
ScoredList topk(const EmbeddingMatrix& db, std::span<const float> query, std::size_t topk);

/// Fused dual-index scores for every passage:
///   lambda * <q, p_j> + (1 - lambda) * sum_{i in NN(q, Q; k)} (1/k) <q, q_i> Y_ij
/// with the neighbor set found by exhaustive scan.
/// Throws UsageError when k == 0, k > Q.rows() or lambda is outside [0, 1].
std::vector<float> pefa_xl_scores(std::span<const float> query, const EmbeddingMatrix& passages,
                                  const EmbeddingMatrix& train_queries, const RelevanceMatrix& y,
                                  float lambda, std::size_t k);

/// Fused single-index scores for every passage, computed from the definition:
///   lambda * <q, p_j> + (1 - lambda) * <q, normalize(sum_{i: Y_ij = 1} q_i)>
/// An empty column contributes zero to the second term.
std::vector<float> pefa_xs_scores(std::span<const float> query, const EmbeddingMatrix& passages,
                                  const EmbeddingMatrix& train_queries, const RelevanceMatrix& y,
                                  float lambda);

/// Ranks a dense score vector and keeps the best topk.
ScoredList rank(std::span<const float> scores, std::size_t topk);

}  // namespace pefa::exact
