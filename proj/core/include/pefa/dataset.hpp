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

#include "pefa/embedding_matrix.hpp"
#include "pefa/relevance_matrix.hpp"

namespace pefa {

/// Everything needed to build and evaluate a retriever: passages, training
/// queries with their relevant passages, and held-out test queries with gold
/// passages. Test and training queries are separate populations.
struct Dataset {
  EmbeddingMatrix passages;
  EmbeddingMatrix train_queries;
  EmbeddingMatrix test_queries;
  RelevanceMatrix train_relevance;  // train_queries x passages
  RelevanceMatrix test_gold;        // test_queries x passages

  /// Throws DataError when dims or relevance shapes disagree.
  void validate_shapes() const;
};

}  // namespace pefa
