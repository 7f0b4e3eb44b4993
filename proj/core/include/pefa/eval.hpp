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
#include <optional>
#include <span>
#include <vector>

#include "pefa/relevance_matrix.hpp"
#include "pefa/scored_list.hpp"

namespace pefa {

/// |top_k(pred) intersect gold| / |gold|. Returns nullopt for an empty gold set,
/// where the metric is undefined. gold need not be sorted; duplicates count once.
std::optional<double> recall_at_k(const ScoredList& pred, std::span<const std::uint32_t> gold,
                                  std::size_t k);

struct EvalResult {
  std::vector<std::size_t> ks;
  std::vector<double> mean_recall;  // parallel to ks
  std::size_t evaluated = 0;
  std::size_t skipped = 0;          // queries with empty gold

  /// Mean recall at cutoff k; throws UsageError when k was not evaluated.
  double at(std::size_t k) const;
};

/// Mean recall over every gold query with equal weight. predictions[i] is
/// the ranked list of query i; queries without gold are skipped with a
/// warning. Throws UsageError when predictions and gold differ in length or
/// ks is empty / contains 0.
EvalResult evaluate(std::span<const ScoredList> predictions, const RelevanceMatrix& gold,
                    std::span<const std::size_t> ks);

}  // namespace pefa
