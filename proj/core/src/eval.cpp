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

#include "pefa/eval.hpp"

#include <algorithm>
#include <string>

#include "pefa/error.hpp"
#include "pefa/log.hpp"

namespace pefa {

std::optional<double> recall_at_k(const ScoredList& pred, std::span<const std::uint32_t> gold,
                                  std::size_t k) {
  std::vector<std::uint32_t> sorted(gold.begin(), gold.end());
  std::sort(sorted.begin(), sorted.end());
  sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
  if (sorted.empty()) {
    return std::nullopt;
  }
  const std::size_t depth = std::min(k, pred.size());
  std::size_t hits = 0;
  for (std::size_t r = 0; r < depth; ++r) {
    hits += std::binary_search(sorted.begin(), sorted.end(), pred[r].id) ? 1 : 0;
  }
  return static_cast<double>(hits) / static_cast<double>(sorted.size());
}

double EvalResult::at(std::size_t k) const {
  for (std::size_t i = 0; i < ks.size(); ++i) {
    if (ks[i] == k) {
      return mean_recall[i];
    }
  }
  throw UsageError("recall@" + std::to_string(k) + " was not evaluated");
}

EvalResult evaluate(std::span<const ScoredList> predictions, const RelevanceMatrix& gold,
                    std::span<const std::size_t> ks) {
  if (predictions.size() != gold.n_queries()) {
    throw UsageError("evaluate: " + std::to_string(predictions.size()) +
                     " prediction lists for " + std::to_string(gold.n_queries()) +
                     " gold queries");
  }
  if (ks.empty() || std::find(ks.begin(), ks.end(), std::size_t{0}) != ks.end()) {
    throw UsageError("evaluate: cutoffs must be a non-empty list of positive integers");
  }
  EvalResult result;
  result.ks.assign(ks.begin(), ks.end());
  std::vector<double> sums(ks.size(), 0.0);
  for (std::size_t i = 0; i < predictions.size(); ++i) {
    const auto g = gold.row(i);
    if (g.empty()) {
      ++result.skipped;
      continue;
    }
    ++result.evaluated;
    for (std::size_t c = 0; c < ks.size(); ++c) {
      sums[c] += *recall_at_k(predictions[i], g, ks[c]);
    }
  }
  if (result.skipped > 0) {
    log::warn("evaluate: skipped " + std::to_string(result.skipped) +
              " queries with empty gold sets");
  }
  result.mean_recall.resize(ks.size(), 0.0);
  if (result.evaluated > 0) {
    for (std::size_t c = 0; c < ks.size(); ++c) {
      result.mean_recall[c] = sums[c] / static_cast<double>(result.evaluated);
    }
  }
  return result;
}

}  // namespace pefa
