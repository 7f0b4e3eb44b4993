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

#include "pefa/dataset.hpp"
#include "pefa/relevance_matrix.hpp"

namespace pefa {

/// Clustered retrieval benchmark on which kNN adaptation helps by construction.
///
/// Every passage and query belongs to one of `clusters` random unit centers.
/// Its latent embedding is normalize(center + noise * g); the embedding handed
/// to the retriever is a further corrupted copy normalize(latent + noise_erm * g).
/// A query is relevant to the `degree` passages of its own cluster whose
/// latent embeddings are most similar to its latent embedding. Neighborhoods
/// of training queries therefore carry relevance signal the corrupted
/// embeddings alone have lost.
struct SyntheticParams {
  std::size_t n = 5000;
  std::size_t m_train = 10000;
  std::size_t m_test = 500;
  std::size_t dim = 16;
  std::size_t clusters = 200;
  double noise = 0.1;
  double noise_erm = 0.12;
  std::size_t degree = 5;
  std::uint64_t seed = 7;

  /// Throws UsageError for empty populations, dim/clusters/degree of zero or
  /// negative noise.
  void validate() const;
};

/// Deterministic in params (same seed, same bytes).
Dataset gen_synthetic(const SyntheticParams& params);

/// Keeps floor(ratio * nnz) pairs drawn uniformly without replacement.
/// ratio must lie in [0, 1].
RelevanceMatrix subsample_supervision(const RelevanceMatrix& y, double ratio, std::uint64_t seed);

}  // namespace pefa
