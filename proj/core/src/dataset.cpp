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

#include "pefa/dataset.hpp"

#include <string>

#include "pefa/error.hpp"

namespace pefa {

void Dataset::validate_shapes() const {
  const std::size_t dim = passages.dim();
  if (train_queries.dim() != dim || test_queries.dim() != dim) {
    throw DataError("dataset: embedding dims differ (passages " + std::to_string(dim) +
                    ", train queries " + std::to_string(train_queries.dim()) +
                    ", test queries " + std::to_string(test_queries.dim()) + ")");
  }
  if (train_relevance.n_queries() != train_queries.rows() ||
      train_relevance.n_passages() != passages.rows()) {
    throw DataError("dataset: training relevance shape does not match embeddings");
  }
  if (test_gold.n_queries() != test_queries.rows() || test_gold.n_passages() != passages.rows()) {
    throw DataError("dataset: test gold shape does not match embeddings");
  }
}

}  // namespace pefa
