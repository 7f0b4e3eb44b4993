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
#include <string>
#include <string_view>
#include <vector>

#include "pefa/dataset.hpp"
#include "pefa/hnsw_index.hpp"

namespace pefa {

enum class Mode { erm, xs, xl };

std::string_view to_string(Mode mode) noexcept;
/// Throws UsageError for anything but "erm", "xs", "xl".
Mode parse_mode(std::string_view text);

struct SweepConfig {
  std::vector<Mode> modes{Mode::xs, Mode::xl};
  std::vector<float> lambdas{0.1f, 0.3f, 0.5f, 0.7f, 0.9f};
  std::vector<std::size_t> knns{16, 32, 64};
  std::vector<std::size_t> ks{10, 100};
  HnswParams hnsw;
  std::size_t ef_search = 300;
  std::size_t candidate_budget = 0;
  std::size_t threads = 0;
};

struct SweepRow {
  Mode mode = Mode::erm;
  float lambda = 1.0f;
  std::size_t k = 0;             // 0 for erm / xs rows
  std::vector<double> recall;    // parallel to SweepTable::ks
};

struct SweepTable {
  std::vector<std::size_t> ks;
  std::vector<SweepRow> rows;

  /// Header `mode lambda k recall@<k>...`, tab separated, 4 decimals.
  std::string to_tsv() const;
  const SweepRow* find(Mode mode, float lambda, std::size_t k = 0) const noexcept;
  const SweepRow& baseline() const;
  /// Recall at cutoff k of a row; throws UsageError for an unknown cutoff.
  double recall(const SweepRow& row, std::size_t k) const;
};

/// One ERM baseline row (lambda = 1), one XS row per lambda and one XL row per
/// (lambda, k). Each XS lambda gets its own index build; XL shares one
/// passage index and one training-query index across the grid.
SweepTable sweep(const Dataset& data, const SweepConfig& config);

}  // namespace pefa
