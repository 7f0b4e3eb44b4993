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

#include "pefa/hnsw_index.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>
#include <random>
#include <string>

#include "pefa/error.hpp"
#include "pefa/vector_ops.hpp"

namespace pefa {
namespace {

// Epoch-stamped visited set, one per thread, reused across searches.
class VisitedSet {
 public:
  void reset(std::size_t n) {
    if (marks_.size() < n) {
      marks_.resize(n, 0);
    }
    if (++epoch_ == 0) {
      std::fill(marks_.begin(), marks_.end(), 0);
      epoch_ = 1;
    }
  }

  // Returns true when the node had already been visited.
  bool test_and_set(std::uint32_t node) noexcept {
    if (marks_[node] == epoch_) {
      return true;
    }
    marks_[node] = epoch_;
    return false;
  }

 private:
  std::vector<std::uint32_t> marks_;
  std::uint32_t epoch_ = 0;
};

VisitedSet& thread_visited() {
  thread_local VisitedSet visited;
  return visited;
}

struct BestOnTop {
  bool operator()(const ScoredId& a, const ScoredId& b) const noexcept {
    return ranks_before(b, a);
  }
};

struct WorstOnTop {
  bool operator()(const ScoredId& a, const ScoredId& b) const noexcept {
    return ranks_before(a, b);
  }
};

// Uniform draw in (0, 1] from the top 53 bits, independent of the standard
// library's distribution implementations.
double uniform_open_closed(std::mt19937_64& rng) {
  return static_cast<double>((rng() >> 11) + 1) * 0x1.0p-53;
}

std::vector<std::uint32_t> draw_levels(std::size_t n, const HnswParams& params) {
  std::mt19937_64 rng(params.seed);
  const double level_mult = 1.0 / std::log(static_cast<double>(params.M));
  std::vector<std::uint32_t> levels(n);
  for (auto& level : levels) {
    level = static_cast<std::uint32_t>(std::floor(-std::log(uniform_open_closed(rng)) * level_mult));
  }
  return levels;
}

}  // namespace

void HnswParams::validate() const {
  if (M < 2) {
    throw UsageError("hnsw: M must be >= 2, got " + std::to_string(M));
  }
  if (ef_construction < M) {
    throw UsageError("hnsw: ef_construction (" + std::to_string(ef_construction) +
                     ") must be >= M (" + std::to_string(M) + ")");
  }
  if (ef_search_default < 1) {
    throw UsageError("hnsw: ef_search_default must be >= 1");
  }
}

HnswIndex::HnswIndex(const HnswParams& params, std::shared_ptr<const EmbeddingMatrix> vectors,
                     std::vector<std::uint32_t> levels)
    : params_(params), vectors_(std::move(vectors)), levels_(std::move(levels)) {
  const std::size_t n = vectors_->rows();
  base_links_.assign(n * (params_.max_degree(0) + 1), 0);
  upper_links_.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (levels_[i] > 0) {
      upper_links_[i].assign(levels_[i] * (static_cast<std::size_t>(params_.M) + 1), 0);
    }
  }
}

HnswIndex HnswIndex::build(std::shared_ptr<const EmbeddingMatrix> vectors,
                           const HnswParams& params) {
  params.validate();
  if (!vectors || vectors->empty()) {
    throw UsageError("hnsw: cannot build an index over an empty matrix");
  }
  if (vectors->rows() > std::numeric_limits<std::uint32_t>::max()) {
    throw UsageError("hnsw: too many rows for 32-bit ids");
  }
  auto levels = draw_levels(vectors->rows(), params);
  HnswIndex index(params, std::move(vectors), std::move(levels));
  for (std::uint32_t node = 0; node < index.levels_.size(); ++node) {
    index.insert(node);
  }
  return index;
}

HnswIndex HnswIndex::from_parts(const HnswParams& params,
                                std::shared_ptr<const EmbeddingMatrix> vectors,
                                std::vector<std::uint32_t> levels,
                                const std::vector<NodeLinks>& links, std::uint32_t entry_point) {
  if (!vectors || vectors->empty()) {
    throw DataError("hnsw: index without vectors");
  }
  const std::size_t n = vectors->rows();
  if (levels.size() != n || links.size() != n) {
    throw DataError("hnsw: node count mismatch between levels, links and vectors");
  }
  try {
    params.validate();
  } catch (const UsageError& e) {
    throw DataError(e.what());
  }
  HnswIndex index(params, std::move(vectors), std::move(levels));
  for (std::uint32_t node = 0; node < n; ++node) {
    if (links[node].size() != index.levels_[node] + 1) {
      throw DataError("hnsw: node " + std::to_string(node) + " has " +
                      std::to_string(links[node].size()) + " layers, expected " +
                      std::to_string(index.levels_[node] + 1));
    }
    for (int layer = 0; layer <= static_cast<int>(index.levels_[node]); ++layer) {
      const auto& ids = links[node][layer];
      if (ids.size() > params.max_degree(layer)) {
        throw DataError("hnsw: node " + std::to_string(node) + " exceeds the degree bound at layer " +
                        std::to_string(layer));
      }
      auto slot = index.mutable_slot(node, layer);
      slot[0] = static_cast<std::uint32_t>(ids.size());
      std::copy(ids.begin(), ids.end(), slot.begin() + 1);
    }
  }
  index.entry_point_ = entry_point;
  index.max_level_ = entry_point < n ? static_cast<int>(index.levels_[entry_point]) : -1;
  try {
    index.validate();
  } catch (const InvariantError& e) {
    throw DataError(std::string("hnsw: corrupt graph: ") + e.what());
  }
  return index;
}

std::span<std::uint32_t> HnswIndex::mutable_slot(std::uint32_t node, int layer) noexcept {
  if (layer == 0) {
    const std::size_t stride = params_.max_degree(0) + 1;
    return {base_links_.data() + node * stride, stride};
  }
  const std::size_t stride = static_cast<std::size_t>(params_.M) + 1;
  return {upper_links_[node].data() + static_cast<std::size_t>(layer - 1) * stride, stride};
}

std::span<const std::uint32_t> HnswIndex::neighbors(std::uint32_t node, int layer) const noexcept {
  const std::uint32_t* slot = nullptr;
  if (layer == 0) {
    slot = base_links_.data() + node * (params_.max_degree(0) + 1);
  } else {
    slot = upper_links_[node].data() +
           static_cast<std::size_t>(layer - 1) * (static_cast<std::size_t>(params_.M) + 1);
  }
  return {slot + 1, slot[0]};
}

void HnswIndex::set_neighbors(std::uint32_t node, int layer, std::span<const ScoredId> ids) {
  auto slot = mutable_slot(node, layer);
  slot[0] = static_cast<std::uint32_t>(ids.size());
  for (std::size_t i = 0; i < ids.size(); ++i) {
    slot[i + 1] = ids[i].id;
  }
}

float HnswIndex::score(const float* query, std::uint32_t node) const noexcept {
  return detail::dot_unchecked(query, vectors_->row_ptr(node), vectors_->dim());
}

std::size_t HnswIndex::edge_count() const noexcept {
  std::size_t edges = 0;
  for (std::uint32_t node = 0; node < levels_.size(); ++node) {
    for (int layer = 0; layer <= level(node); ++layer) {
      edges += neighbors(node, layer).size();
    }
  }
  return edges;
}

ScoredId HnswIndex::greedy_descend(const float* query, ScoredId current, int layer) const {
  bool changed = true;
  while (changed) {
    changed = false;
    for (auto nb : neighbors(current.id, layer)) {
      const ScoredId candidate{nb, score(query, nb)};
      if (ranks_before(candidate, current)) {
        current = candidate;
        changed = true;
      }
    }
  }
  return current;
}

std::vector<ScoredId> HnswIndex::search_layer(const float* query,
                                              std::span<const ScoredId> entries, std::size_t ef,
                                              int layer) const {
  auto& visited = thread_visited();
  visited.reset(levels_.size());

  std::priority_queue<ScoredId, std::vector<ScoredId>, BestOnTop> candidates;
  std::priority_queue<ScoredId, std::vector<ScoredId>, WorstOnTop> results;
  for (const auto& e : entries) {
    if (visited.test_and_set(e.id)) {
      continue;
    }
    candidates.push(e);
    results.push(e);
    if (results.size() > ef) {
      results.pop();
    }
  }

  while (!candidates.empty()) {
    const ScoredId current = candidates.top();
    if (results.size() >= ef && ranks_before(results.top(), current)) {
      break;
    }
    candidates.pop();
    for (auto nb : neighbors(current.id, layer)) {
      if (visited.test_and_set(nb)) {
        continue;
      }
      const ScoredId next{nb, score(query, nb)};
      if (results.size() < ef || ranks_before(next, results.top())) {
        candidates.push(next);
        results.push(next);
        if (results.size() > ef) {
          results.pop();
        }
      }
    }
  }

  std::vector<ScoredId> out(results.size());
  for (auto it = out.rbegin(); it != out.rend(); ++it) {
    *it = results.top();
    results.pop();
  }
  return out;
}

std::vector<ScoredId> HnswIndex::select_neighbors(std::span<const ScoredId> candidates,
                                                  std::size_t max_count) const {
  if (candidates.size() <= max_count) {
    return {candidates.begin(), candidates.end()};
  }
  std::vector<ScoredId> selected;
  std::vector<ScoredId> pruned;
  selected.reserve(max_count);
  for (const auto& c : candidates) {
    if (selected.size() >= max_count) {
      break;
    }
    // Keep c only if it is closer to the base point than to every neighbor
    // already selected.
    const float* c_vec = vectors_->row_ptr(c.id);
    bool diverse = true;
    for (const auto& s : selected) {
      if (score(c_vec, s.id) > c.score) {
        diverse = false;
        break;
      }
    }
    (diverse ? selected : pruned).push_back(c);
  }
  for (const auto& p : pruned) {
    if (selected.size() >= max_count) {
      break;
    }
    selected.push_back(p);
  }
  return selected;
}

void HnswIndex::link_back(std::uint32_t target, std::uint32_t node, int layer) {
  auto slot = mutable_slot(target, layer);
  const std::size_t cap = params_.max_degree(layer);
  const std::size_t count = slot[0];
  if (count < cap) {
    slot[count + 1] = node;
    slot[0] = static_cast<std::uint32_t>(count + 1);
    return;
  }
  const float* base = vectors_->row_ptr(target);
  std::vector<ScoredId> candidates;
  candidates.reserve(count + 1);
  for (std::size_t i = 0; i < count; ++i) {
    candidates.push_back({slot[i + 1], score(base, slot[i + 1])});
  }
  candidates.push_back({node, score(base, node)});
  std::sort(candidates.begin(), candidates.end(), ranks_before);
  set_neighbors(target, layer, select_neighbors(candidates, cap));
}

void HnswIndex::insert(std::uint32_t node) {
  const int node_level = level(node);
  if (max_level_ < 0) {
    entry_point_ = node;
    max_level_ = node_level;
    return;
  }
  const float* query = vectors_->row_ptr(node);
  ScoredId current{entry_point_, score(query, entry_point_)};
  for (int layer = max_level_; layer > node_level; --layer) {
    current = greedy_descend(query, current, layer);
  }

  std::vector<ScoredId> entries{current};
  for (int layer = std::min(node_level, max_level_); layer >= 0; --layer) {
    auto found = search_layer(query, entries, params_.ef_construction, layer);
    auto selected = select_neighbors(found, params_.M);
    set_neighbors(node, layer, selected);
    for (const auto& s : selected) {
      link_back(s.id, node, layer);
    }
    entries = std::move(found);
  }

  if (node_level > max_level_) {
    entry_point_ = node;
    max_level_ = node_level;
  }
}

ScoredList HnswIndex::search(std::span<const float> query, std::size_t topk,
                             std::size_t ef) const {
  if (query.size() != vectors_->dim()) {
    throw UsageError("hnsw: query dim " + std::to_string(query.size()) + " != index dim " +
                     std::to_string(vectors_->dim()));
  }
  if (topk == 0 || max_level_ < 0) {
    return {};
  }
  ef = std::max(ef, topk);
  ScoredId current{entry_point_, score(query.data(), entry_point_)};
  for (int layer = max_level_; layer > 0; --layer) {
    current = greedy_descend(query.data(), current, layer);
  }
  const ScoredId entry[] = {current};
  auto found = search_layer(query.data(), entry, ef, 0);
  if (found.size() > topk) {
    found.resize(topk);
  }
  return ScoredList::from_ranked(std::move(found));
}

void HnswIndex::validate() const {
  const std::size_t n = levels_.size();
  if (n != vectors_->rows()) {
    throw InvariantError("hnsw: level array size differs from vector count");
  }
  if (n == 0) {
    return;
  }
  if (entry_point_ >= n) {
    throw InvariantError("hnsw: entry point " + std::to_string(entry_point_) + " out of range");
  }
  const auto top = *std::max_element(levels_.begin(), levels_.end());
  if (levels_[entry_point_] != top || max_level_ != static_cast<int>(top)) {
    throw InvariantError("hnsw: entry point does not have the maximum level");
  }
  std::vector<std::uint32_t> seen;
  for (std::uint32_t node = 0; node < n; ++node) {
    for (int layer = 0; layer <= level(node); ++layer) {
      auto list = neighbors(node, layer);
      if (list.size() > params_.max_degree(layer)) {
        throw InvariantError("hnsw: node " + std::to_string(node) + " has degree " +
                             std::to_string(list.size()) + " at layer " + std::to_string(layer));
      }
      seen.assign(list.begin(), list.end());
      std::sort(seen.begin(), seen.end());
      if (std::adjacent_find(seen.begin(), seen.end()) != seen.end()) {
        throw InvariantError("hnsw: duplicate edge at node " + std::to_string(node));
      }
      for (auto nb : list) {
        if (nb >= n || nb == node || level(nb) < layer) {
          throw InvariantError("hnsw: invalid edge " + std::to_string(node) + " -> " +
                               std::to_string(nb) + " at layer " + std::to_string(layer));
        }
      }
    }
  }
}

}  // namespace pefa
