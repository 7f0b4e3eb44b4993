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

#include "pefa/mips_index.hpp"

#include <string>
#include <vector>

#include "pefa/error.hpp"
#include "pefa/vector_ops.hpp"

namespace pefa {

FlatIndex::FlatIndex(std::shared_ptr<const EmbeddingMatrix> vectors)
    : vectors_(std::move(vectors)) {
  if (!vectors_) {
    throw UsageError("flat index: null embedding matrix");
  }
}

ScoredList FlatIndex::search(std::span<const float> query, std::size_t topk,
                             std::size_t /*ef*/) const {
  const auto& db = *vectors_;
  if (query.size() != db.dim()) {
    throw UsageError("flat index: query dim " + std::to_string(query.size()) +
                     " != index dim " + std::to_string(db.dim()));
  }
  std::vector<ScoredId> scored(db.rows());
  for (std::size_t i = 0; i < db.rows(); ++i) {
    scored[i] = {static_cast<std::uint32_t>(i),
                 detail::dot_unchecked(query.data(), db.row_ptr(i), db.dim())};
  }
  return ScoredList::top_k(std::move(scored), topk);
}

}  // namespace pefa
