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

#include "pefa/exact_search.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "pefa/error.hpp"

namespace pefa::exact {
namespace {

// f64 products, coordinate t accumulated into lane t % 4, lanes paired as
// (0 + 1) + (2 + 3). This is the library-wide canonical summation order.
double inner_f64(std::span<const float> a, std::span<const float> b) {
  double lanes[4] = {0.0, 0.0, 0.0, 0.0};
  for (std::size_t t = 0; t < a.size(); ++t) {
    lanes[t % 4] += static_cast<double>(a[t]) * static_cast<double>(b[t]);
  }
  return (lanes[0] + lanes[1]) + (lanes[2] + lanes[3]);
}

float inner(std::span<const float> a, std::span<const float> b) {
  return static_cast<float>(inner_f64(a, b));
}

bool before(const ScoredId& a, const ScoredId& b) {
  return a.score > b.score || (a.score == b.score && a.id < b.id);
}

void check_dims(std::span<const float> query, const EmbeddingMatrix& m, const char* what) {
  if (query.size() != m.dim()) {
    throw UsageError(std::string("exact: query dim ") + std::to_string(query.size()) +
                     " != " + what + " dim " + std::to_string(m.dim()));
  }
}

void check_lambda(float lambda) {
  if (!(lambda >= 0.0f && lambda <= 1.0f)) {
    throw UsageError("exact: lambda must lie in [0, 1], got " + std::to_string(lambda));
  }
}

void check_shapes(const EmbeddingMatrix& passages, const EmbeddingMatrix& train_queries,
                  const RelevanceMatrix& y) {
  if (y.n_queries() != train_queries.rows() || y.n_passages() != passages.rows()) {
    throw UsageError("exact: relevance shape does not match the embedding matrices");
  }
  if (passages.dim() != train_queries.dim()) {
    throw UsageError("exact: passage and query embeddings differ in dim");
  }
}

}  // namespace

ScoredList rank(std::span<const float> scores, std::size_t topk) {
  std::vector<ScoredId> all(scores.size());
  for (std::size_t j = 0; j < scores.size(); ++j) {
    all[j] = {static_cast<std::uint32_t>(j), scores[j]};
  }
  std::sort(all.begin(), all.end(), before);
  if (all.size() > topk) {
    all.resize(topk);
  }
  return ScoredList::from_ranked(std::move(all));
}

ScoredList topk(const EmbeddingMatrix& db, std::span<const float> query, std::size_t topk) {
  check_dims(query, db, "database");
  std::vector<float> scores(db.rows());
  for (std::size_t j = 0; j < db.rows(); ++j) {
    scores[j] = inner(query, db.row(j));
  }
  return rank(scores, topk);
}

std::vector<float> pefa_xl_scores(std::span<const float> query, const EmbeddingMatrix& passages,
                                  const EmbeddingMatrix& train_queries, const RelevanceMatrix& y,
                                  float lambda, std::size_t k) {
  check_dims(query, passages, "passage");
  check_shapes(passages, train_queries, y);
  check_lambda(lambda);
  if (k == 0 || k > train_queries.rows()) {
    throw UsageError("exact: k must lie in [1, " + std::to_string(train_queries.rows()) +
                     "], got " + std::to_string(k));
  }

  // Exhaustive nearest training queries, truncated at exactly k.
  const ScoredList neighbors = topk(train_queries, query, k);

  const double lam = lambda;
  const double k_count = static_cast<double>(k);
  std::vector<float> fused(passages.rows());
  for (std::size_t j = 0; j < passages.rows(); ++j) {
    const auto relevant = y.col(j);
    double knn = 0.0;
    for (const auto& nb : neighbors) {
      if (std::binary_search(relevant.begin(), relevant.end(), nb.id)) {
        knn += static_cast<double>(nb.score);
      }
    }
    const double erm = static_cast<double>(inner(query, passages.row(j)));
    fused[j] = static_cast<float>(lam * erm + (1.0 - lam) * (knn / k_count));
  }
  return fused;
}

std::vector<float> pefa_xs_scores(std::span<const float> query, const EmbeddingMatrix& passages,
                                  const EmbeddingMatrix& train_queries, const RelevanceMatrix& y,
                                  float lambda) {
  check_dims(query, passages, "passage");
  check_shapes(passages, train_queries, y);
  check_lambda(lambda);

  const std::size_t dim = passages.dim();
  const double lam = lambda;
  std::vector<double> aggregate(dim);
  std::vector<float> fused(passages.rows());
  for (std::size_t j = 0; j < passages.rows(); ++j) {
    std::fill(aggregate.begin(), aggregate.end(), 0.0);
    for (auto i : y.col(j)) {
      const auto q = train_queries.row(i);
      for (std::size_t t = 0; t < dim; ++t) {
        aggregate[t] += q[t];
      }
    }
    double norm_sq = 0.0;
    for (double a : aggregate) {
      norm_sq += a * a;
    }
    const double norm = std::sqrt(norm_sq);
    double knn = 0.0;
    if (norm > 1e-12) {
      for (std::size_t t = 0; t < dim; ++t) {
        knn += static_cast<double>(query[t]) * (aggregate[t] / norm);
      }
    }
    fused[j] = static_cast<float>(lam * inner_f64(query, passages.row(j)) + (1.0 - lam) * knn);
  }
  return fused;
}

}  // namespace pefa::exact
