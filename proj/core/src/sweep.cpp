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

#include "pefa/sweep.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <memory>
#include <string>

#include "pefa/error.hpp"
#include "pefa/eval.hpp"
#include "pefa/fusion.hpp"
#include "pefa/log.hpp"

namespace pefa {
namespace {

std::string fixed4(double value) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.4f", value);
  return buf;
}

std::vector<double> recalls(const std::vector<ScoredList>& predictions, const Dataset& data,
                            const std::vector<std::size_t>& ks) {
  return evaluate(predictions, data.test_gold, ks).mean_recall;
}

}  // namespace

std::string_view to_string(Mode mode) noexcept {
  switch (mode) {
    case Mode::erm:
      return "erm";
    case Mode::xs:
      return "xs";
    case Mode::xl:
      return "xl";
  }
  return "?";
}

Mode parse_mode(std::string_view text) {
  if (text == "erm") return Mode::erm;
  if (text == "xs") return Mode::xs;
  if (text == "xl") return Mode::xl;
  throw UsageError("unknown mode '" + std::string(text) + "' (expected erm, xs or xl)");
}

std::string SweepTable::to_tsv() const {
  std::string out = "mode\tlambda\tk";
  for (auto k : ks) {
    out += "\trecall@" + std::to_string(k);
  }
  out += '\n';
  for (const auto& row : rows) {
    out += std::string(to_string(row.mode)) + '\t' + fixed4(row.lambda) + '\t' +
           std::to_string(row.k);
    for (double r : row.recall) {
      out += '\t' + fixed4(r);
    }
    out += '\n';
  }
  return out;
}

const SweepRow* SweepTable::find(Mode mode, float lambda, std::size_t k) const noexcept {
  for (const auto& row : rows) {
    if (row.mode == mode && std::abs(row.lambda - lambda) < 1e-6f && row.k == k) {
      return &row;
    }
  }
  return nullptr;
}

const SweepRow& SweepTable::baseline() const {
  if (const auto* row = find(Mode::erm, 1.0f, 0)) {
    return *row;
  }
  throw UsageError("sweep table has no baseline row");
}

double SweepTable::recall(const SweepRow& row, std::size_t k) const {
  for (std::size_t c = 0; c < ks.size(); ++c) {
    if (ks[c] == k) {
      return row.recall[c];
    }
  }
  throw UsageError("sweep table has no recall@" + std::to_string(k) + " column");
}

SweepTable sweep(const Dataset& data, const SweepConfig& config) {
  data.validate_shapes();
  if (config.ks.empty()) {
    throw UsageError("sweep: no recall cutoffs");
  }
  const std::size_t topk = *std::max_element(config.ks.begin(), config.ks.end());

  SweepTable table;
  table.ks = config.ks;

  auto passages = std::make_shared<const EmbeddingMatrix>(data.passages);
  auto passage_index = std::make_shared<const HnswIndex>(HnswIndex::build(passages, config.hnsw));
  const auto erm_predictions =
      search_batch(*passage_index, data.test_queries, topk, config.ef_search, config.threads);
  table.rows.push_back({Mode::erm, 1.0f, 0, recalls(erm_predictions, data, config.ks)});
  log::info("sweep: erm baseline done");

  const bool want_xs = std::find(config.modes.begin(), config.modes.end(), Mode::xs) != config.modes.end();
  const bool want_xl = std::find(config.modes.begin(), config.modes.end(), Mode::xl) != config.modes.end();

  if (want_xs) {
    for (float lambda : config.lambdas) {
      const XsIndex xs = build_xs_index(data.passages, data.train_queries, data.train_relevance,
                                        lambda, config.hnsw);
      const auto predictions =
          search_batch(xs.index, data.test_queries, topk, config.ef_search, config.threads);
      table.rows.push_back({Mode::xs, lambda, 0, recalls(predictions, data, config.ks)});
      log::info("sweep: xs lambda=" + fixed4(lambda) + " done");
    }
  }

  if (want_xl) {
    auto train = std::make_shared<const EmbeddingMatrix>(data.train_queries);
    auto query_index = std::make_shared<const HnswIndex>(HnswIndex::build(train, config.hnsw));
    const XlIndexPair pair(passage_index, query_index, data.train_relevance);
    for (float lambda : config.lambdas) {
      for (std::size_t k : config.knns) {
        FusionConfig fusion;
        fusion.lambda = lambda;
        fusion.k = k;
        fusion.candidate_budget = config.candidate_budget;
        fusion.ef_search = config.ef_search;
        const auto predictions =
            xl_search_batch(data.test_queries, pair, fusion, topk, config.threads);
        table.rows.push_back({Mode::xl, lambda, k, recalls(predictions, data, config.ks)});
      }
      log::info("sweep: xl lambda=" + fixed4(lambda) + " done");
    }
  }
  return table;
}

}  // namespace pefa
