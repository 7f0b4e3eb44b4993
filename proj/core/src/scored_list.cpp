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

#include "pefa/scored_list.hpp"

#include <algorithm>
#include <string>

#include "pefa/error.hpp"

namespace pefa {

ScoredList ScoredList::top_k(std::vector<ScoredId> candidates, std::size_t topk) {
  const std::size_t keep = std::min(topk, candidates.size());
  std::partial_sort(candidates.begin(), candidates.begin() + static_cast<std::ptrdiff_t>(keep),
                    candidates.end(), ranks_before);
  candidates.resize(keep);
  return from_ranked(std::move(candidates));
}

ScoredList ScoredList::from_ranked(std::vector<ScoredId> entries) {
  for (std::size_t i = 1; i < entries.size(); ++i) {
    if (!ranks_before(entries[i - 1], entries[i])) {
      throw InvariantError("scored list: entries not in (-score, id) order at position " +
                           std::to_string(i));
    }
  }
  std::vector<std::uint32_t> ids;
  ids.reserve(entries.size());
  for (const auto& e : entries) {
    ids.push_back(e.id);
  }
  std::sort(ids.begin(), ids.end());
  if (auto dup = std::adjacent_find(ids.begin(), ids.end()); dup != ids.end()) {
    throw InvariantError("scored list: duplicate id " + std::to_string(*dup));
  }
  return ScoredList(std::move(entries));
}

std::vector<std::uint32_t> ScoredList::ids() const {
  std::vector<std::uint32_t> out;
  out.reserve(entries_.size());
  for (const auto& e : entries_) {
    out.push_back(e.id);
  }
  return out;
}

void ScoredList::truncate(std::size_t n) {
  if (n < entries_.size()) {
    entries_.resize(n);
  }
}

}  // namespace pefa
