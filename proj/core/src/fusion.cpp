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

#include "pefa/fusion.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>

#include "pefa/error.hpp"
#include "pefa/log.hpp"
#include "pefa/parallel.hpp"
#include "pefa/vector_ops.hpp"

namespace pefa {
namespace {

void check_lambda(float lambda) {
  if (!(lambda >= 0.0f && lambda <= 1.0f)) {
    throw UsageError("lambda must lie in [0, 1], got " + std::to_string(lambda));
  }
}

void check_training_shapes(const EmbeddingMatrix& passages, const EmbeddingMatrix& train_queries,
                           const RelevanceMatrix& y) {
  if (passages.dim() != train_queries.dim()) {
    throw UsageError("passage dim " + std::to_string(passages.dim()) +
                     " != training query dim " + std::to_string(train_queries.dim()));
  }
  if (y.n_queries() != train_queries.rows() || y.n_passages() != passages.rows()) {
    throw UsageError("relevance shape " + std::to_string(y.n_queries()) + "x" +
                     std::to_string(y.n_passages()) + " does not match " +
                     std::to_string(train_queries.rows()) + " training queries x " +
                     std::to_string(passages.rows()) + " passages");
  }
}

}  // namespace

std::size_t FusionConfig::effective_budget(std::size_t topk) const noexcept {
  return candidate_budget == 0 ? std::max(topk, kDefaultCandidateBudget) : candidate_budget;
}

void FusionConfig::validate(std::size_t topk) const {
  check_lambda(lambda);
  if (k == 0) {
    throw UsageError("k must be >= 1");
  }
  if (candidate_budget != 0 && candidate_budget < topk) {
    throw UsageError("candidate budget " + std::to_string(candidate_budget) +
                     " is smaller than topk " + std::to_string(topk));
  }
}

EmbeddingMatrix pifa_aggregate(const EmbeddingMatrix& train_queries, const RelevanceMatrix& y) {
  if (y.n_queries() != train_queries.rows()) {
    throw UsageError("pifa: relevance has " + std::to_string(y.n_queries()) +
                     " queries, embeddings have " + std::to_string(train_queries.rows()));
  }
  const std::size_t n = y.n_passages();
  const std::size_t dim = train_queries.dim();
  std::vector<float> data(n * dim, 0.0f);
  std::vector<std::uint32_t> zero_rows;
  std::vector<double> sum(dim);
  for (std::size_t j = 0; j < n; ++j) {
    std::fill(sum.begin(), sum.end(), 0.0);
    for (auto i : y.col(j)) {
      const float* q = train_queries.row_ptr(i);
      for (std::size_t t = 0; t < dim; ++t) {
        sum[t] += q[t];
      }
    }
    double norm_sq = 0.0;
    for (double s : sum) {
      norm_sq += s * s;
    }
    const double norm = std::sqrt(norm_sq);
    if (!(norm > kZeroNormThreshold)) {
      zero_rows.push_back(static_cast<std::uint32_t>(j));
      continue;
    }
    float* out = data.data() + j * dim;
    for (std::size_t t = 0; t < dim; ++t) {
      out[t] = static_cast<float>(sum[t] / norm);
    }
  }
  return EmbeddingMatrix(n, dim, std::move(data), std::move(zero_rows));
}

EmbeddingMatrix build_xs_embeddings(const EmbeddingMatrix& passages,
                                    const EmbeddingMatrix& train_queries,
                                    const RelevanceMatrix& y, float lambda) {
  check_lambda(lambda);
  check_training_shapes(passages, train_queries, y);
  const EmbeddingMatrix pifa = pifa_aggregate(train_queries, y);
  const double lam = lambda;
  const auto p = passages.data();
  const auto a = pifa.data();
  std::vector<float> fused(p.size());
  for (std::size_t x = 0; x < p.size(); ++x) {
    fused[x] = static_cast<float>(lam * p[x] + (1.0 - lam) * a[x]);
  }
  return EmbeddingMatrix(passages.rows(), passages.dim(), std::move(fused));
}

XsIndex build_xs_index(const EmbeddingMatrix& passages, const EmbeddingMatrix& train_queries,
                       const RelevanceMatrix& y, float lambda, const HnswParams& params) {
  auto fused = std::make_shared<const EmbeddingMatrix>(
      build_xs_embeddings(passages, train_queries, y, lambda));
  std::size_t zero_rows = 0;
  for (std::size_t j = 0; j < y.n_passages(); ++j) {
    zero_rows += y.col(j).empty() ? 1 : 0;
  }
  if (zero_rows > 0) {
    log::info(std::to_string(zero_rows) +
              " passages have no relevant training query; their fused rows are lambda * p");
  }
  return XsIndex{HnswIndex::build(std::move(fused), params), lambda, zero_rows};
}

XlIndexPair::XlIndexPair(std::shared_ptr<const MipsIndex> passage_index,
                         std::shared_ptr<const MipsIndex> query_index, RelevanceMatrix relevance)
    : passage_index_(std::move(passage_index)),
      query_index_(std::move(query_index)),
      relevance_(std::move(relevance)) {
  if (!passage_index_ || !query_index_) {
    throw UsageError("xl: both indices are required");
  }
  check_training_shapes(passage_index_->vectors(), query_index_->vectors(), relevance_);
}

ScoredList xl_search(std::span<const float> query, const XlIndexPair& index,
                     const FusionConfig& cfg, std::size_t topk) {
  cfg.validate(topk);
  const EmbeddingMatrix& passages = index.passages();
  if (query.size() != passages.dim()) {
    throw UsageError("xl: query dim " + std::to_string(query.size()) + " != index dim " +
                     std::to_string(passages.dim()));
  }
  if (cfg.k > index.n_train_queries()) {
    throw UsageError("xl: k = " + std::to_string(cfg.k) + " exceeds the " +
                     std::to_string(index.n_train_queries()) + " training queries");
  }
  if (topk == 0) {
    return {};
  }

  if (cfg.lambda == 1.0f) {
    return index.passage_index().search(query, topk, cfg.ef_search);
  }

  const std::size_t budget = cfg.effective_budget(topk);
  const ScoredList erm =
      index.passage_index().search(query, budget, std::max(cfg.ef_search, budget));

  const ScoredList neighbors =
      index.query_index().search(query, cfg.k, std::max(cfg.ef_search, cfg.k));
  if (neighbors.size() < cfg.k) {
    log::warn("xl: query index returned " + std::to_string(neighbors.size()) + " of k = " +
              std::to_string(cfg.k) + " neighbors; kNN weights stay 1/k");
  }

  // Votes in neighbor rank order; the stable sort keeps that order within a
  // passage so the f64 sums are reproducible.
  std::vector<std::pair<std::uint32_t, float>> votes;
  for (const auto& nb : neighbors) {
    for (auto j : index.relevance().row(nb.id)) {
      votes.emplace_back(j, nb.score);
    }
  }
  std::stable_sort(votes.begin(), votes.end(),
                   [](const auto& a, const auto& b) { return a.first < b.first; });

  std::vector<std::pair<std::uint32_t, double>> knn;
  for (const auto& [j, sim] : votes) {
    if (knn.empty() || knn.back().first != j) {
      knn.emplace_back(j, 0.0);
    }
    knn.back().second += static_cast<double>(sim);
  }

  std::vector<std::uint32_t> erm_ids = erm.ids();
  std::sort(erm_ids.begin(), erm_ids.end());
  std::vector<std::pair<std::uint32_t, double>> support;
  support.reserve(knn.size() + erm_ids.size());
  auto k_it = knn.begin();
  auto e_it = erm_ids.begin();
  while (k_it != knn.end() || e_it != erm_ids.end()) {
    if (e_it == erm_ids.end() || (k_it != knn.end() && k_it->first <= *e_it)) {
      if (e_it != erm_ids.end() && k_it->first == *e_it) {
        ++e_it;
      }
      support.push_back(*k_it++);
    } else {
      support.emplace_back(*e_it++, 0.0);
    }
  }

  const double lam = cfg.lambda;
  const double k_count = static_cast<double>(cfg.k);
  std::vector<ScoredId> candidates;
  candidates.reserve(support.size());
  for (const auto& [j, knn_sum] : support) {
    const double erm_score =
        detail::dot_unchecked(query.data(), passages.row_ptr(j), passages.dim());
    candidates.push_back(
        {j, static_cast<float>(lam * erm_score + (1.0 - lam) * (knn_sum / k_count))});
  }
  if (candidates.empty()) {
    throw UsageError("xl: empty candidate set");
  }
  return ScoredList::top_k(std::move(candidates), topk);
}

std::vector<ScoredList> xl_search_batch(const EmbeddingMatrix& queries, const XlIndexPair& index,
                                        const FusionConfig& cfg, std::size_t topk,
                                        std::size_t threads) {
  std::vector<ScoredList> out(queries.rows());
  parallel_for(queries.rows(), threads,
               [&](std::size_t i) { out[i] = xl_search(queries.row(i), index, cfg, topk); });
  return out;
}

std::vector<ScoredList> search_batch(const MipsIndex& index, const EmbeddingMatrix& queries,
                                     std::size_t topk, std::size_t ef, std::size_t threads) {
  std::vector<ScoredList> out(queries.rows());
  parallel_for(queries.rows(), threads,
               [&](std::size_t i) { out[i] = index.search(queries.row(i), topk, ef); });
  return out;
}

}  // namespace pefa
