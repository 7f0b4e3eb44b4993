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
#include <memory>
#include <span>
#include <vector>

#include "pefa/embedding_matrix.hpp"
#include "pefa/mips_index.hpp"
#include "pefa/scored_list.hpp"

namespace pefa {

struct HnswParams {
  /// Max out-degree on layers >= 1; layer 0 allows 2 * M.
  std::uint32_t M = 32;
  std::uint32_t ef_construction = 500;
  std::uint32_t ef_search_default = 300;
  std::uint64_t seed = 100;

  /// Throws UsageError unless M >= 2, ef_construction >= M, ef_search_default >= 1.
  void validate() const;

  std::size_t max_degree(int layer) const noexcept {
    return layer == 0 ? 2 * static_cast<std::size_t>(M) : M;
  }
};

/// Hierarchical navigable small world graph for inner-product search.
///
/// Construction is single-threaded and deterministic given (vectors, seed):
/// rows are inserted in order, levels are drawn from a geometric
/// distribution with multiplier 1/ln(M), and neighbor lists are chosen with
/// the diversity heuristic (pruned candidates fill remaining slots).
/// The index is immutable after build; searches may run concurrently.
class HnswIndex final : public MipsIndex {
 public:
  using NodeLinks = std::vector<std::vector<std::uint32_t>>;  // [layer] -> neighbor ids

  /// Throws UsageError for an empty matrix or invalid params.
  static HnswIndex build(std::shared_ptr<const EmbeddingMatrix> vectors,
                         const HnswParams& params);

  /// Reassembles a persisted graph. links[node] holds one list per layer
  /// 0..levels[node]. Runs validate() and throws DataError on any violation.
  static HnswIndex from_parts(const HnswParams& params,
                              std::shared_ptr<const EmbeddingMatrix> vectors,
                              std::vector<std::uint32_t> levels, const std::vector<NodeLinks>& links,
                              std::uint32_t entry_point);

  /// ef is raised to topk when smaller. Throws UsageError on dim mismatch.
  ScoredList search(std::span<const float> query, std::size_t topk,
                    std::size_t ef) const override;

  const EmbeddingMatrix& vectors() const noexcept override { return *vectors_; }
  const std::shared_ptr<const EmbeddingMatrix>& shared_vectors() const noexcept { return vectors_; }

  const HnswParams& params() const noexcept { return params_; }
  std::uint32_t entry_point() const noexcept { return entry_point_; }
  int max_level() const noexcept { return max_level_; }
  int level(std::uint32_t node) const noexcept { return static_cast<int>(levels_[node]); }
  std::span<const std::uint32_t> levels() const noexcept { return levels_; }
  std::span<const std::uint32_t> neighbors(std::uint32_t node, int layer) const noexcept;

  /// Number of directed edges over all layers.
  std::size_t edge_count() const noexcept;

  /// Walks every adjacency list and checks degree bounds, endpoint ranges,
  /// endpoint levels and the entry point. Throws InvariantError.
  void validate() const;

 private:
  HnswIndex(const HnswParams& params, std::shared_ptr<const EmbeddingMatrix> vectors,
            std::vector<std::uint32_t> levels);

  std::span<std::uint32_t> mutable_slot(std::uint32_t node, int layer) noexcept;
  void set_neighbors(std::uint32_t node, int layer, std::span<const ScoredId> ids);

  void insert(std::uint32_t node);
  ScoredId greedy_descend(const float* query, ScoredId current, int layer) const;
  std::vector<ScoredId> search_layer(const float* query, std::span<const ScoredId> entries,
                                     std::size_t ef, int layer) const;
  std::vector<ScoredId> select_neighbors(std::span<const ScoredId> candidates,
                                         std::size_t max_count) const;
  void link_back(std::uint32_t target, std::uint32_t node, int layer);

  float score(const float* query, std::uint32_t node) const noexcept;

  HnswParams params_;
  std::shared_ptr<const EmbeddingMatrix> vectors_;
  std::vector<std::uint32_t> levels_;
  // Layer 0: fixed stride of (2M + 1) words per node, [count, ids...].
  std::vector<std::uint32_t> base_links_;
  // Layers >= 1: per node, level * (M + 1) words laid out like base_links_.
  std::vector<std::vector<std::uint32_t>> upper_links_;
  std::uint32_t entry_point_ = 0;
  int max_level_ = -1;
};

}  // namespace pefa
