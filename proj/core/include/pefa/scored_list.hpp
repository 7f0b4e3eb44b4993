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
#include <vector>

namespace pefa {

struct ScoredId {
  std::uint32_t id = 0;
  float score = 0.0f;

  friend bool operator==(const ScoredId&, const ScoredId&) = default;
};

/// Ranking order used everywhere: higher score first, ties by ascending id.
inline bool ranks_before(const ScoredId& a, const ScoredId& b) noexcept {
  if (a.score != b.score) {
    return a.score > b.score;
  }
  return a.id < b.id;
}

/// Ranked retrieval output, strictly ordered under (-score, id), no duplicate ids.
class ScoredList {
 public:
  ScoredList() = default;

  /// Sorts the candidates and keeps the best topk. Throws InvariantError on
  /// duplicate ids.
  static ScoredList top_k(std::vector<ScoredId> candidates, std::size_t topk);

  /// Wraps entries that are already ranked. Throws InvariantError otherwise.
  static ScoredList from_ranked(std::vector<ScoredId> entries);

  const std::vector<ScoredId>& entries() const noexcept { return entries_; }
  std::size_t size() const noexcept { return entries_.size(); }
  bool empty() const noexcept { return entries_.empty(); }
  const ScoredId& operator[](std::size_t i) const noexcept { return entries_[i]; }
  auto begin() const noexcept { return entries_.begin(); }
  auto end() const noexcept { return entries_.end(); }

  std::vector<std::uint32_t> ids() const;

  /// Drops everything after the first n entries.
  void truncate(std::size_t n);

  friend bool operator==(const ScoredList&, const ScoredList&) = default;

 private:
  explicit ScoredList(std::vector<ScoredId> entries) : entries_(std::move(entries)) {}

  std::vector<ScoredId> entries_;
};

}  // namespace pefa
