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

#include "pefa/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "pefa/error.hpp"

namespace pefa {
namespace {

using Rng = std::mt19937_64;

void normalize_in_place(std::vector<double>& v) {
  double norm_sq = 0.0;
  for (double x : v) {
    norm_sq += x * x;
  }
  const double norm = std::sqrt(norm_sq);
  if (norm > 0.0) {
    for (double& x : v) {
      x /= norm;
    }
  }
}

std::vector<double> perturb(std::span<const double> base, double sigma, Rng& rng,
                            std::normal_distribution<double>& gauss) {
  std::vector<double> out(base.begin(), base.end());
  for (double& x : out) {
    x += sigma * gauss(rng);
  }
  normalize_in_place(out);
  return out;
}

struct Population {
  std::vector<std::size_t> cluster;
  std::vector<double> latent;  // rows x dim
  EmbeddingMatrix observed;
};

Population draw_population(std::size_t rows, bool balanced, const SyntheticParams& p,
                           const std::vector<double>& centers, Rng& rng) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::uniform_int_distribution<std::size_t> pick(0, p.clusters - 1);
  Population pop;
  pop.cluster.resize(rows);
  pop.latent.resize(rows * p.dim);
  std::vector<float> observed(rows * p.dim);
  for (std::size_t i = 0; i < rows; ++i) {
    const std::size_t c = balanced ? i % p.clusters : pick(rng);
    pop.cluster[i] = c;
    const auto latent = perturb({centers.data() + c * p.dim, p.dim}, p.noise, rng, gauss);
    const auto seen = perturb(latent, p.noise_erm, rng, gauss);
    std::copy(latent.begin(), latent.end(), pop.latent.begin() + i * p.dim);
    for (std::size_t t = 0; t < p.dim; ++t) {
      observed[i * p.dim + t] = static_cast<float>(seen[t]);
    }
  }
  pop.observed = EmbeddingMatrix(rows, p.dim, std::move(observed));
  return pop;
}

RelevanceMatrix relevance_by_latent(const Population& queries, const Population& passages,
                                    const std::vector<std::vector<std::uint32_t>>& members,
                                    const SyntheticParams& p) {
  std::vector<RelevancePair> pairs;
  std::vector<std::pair<double, std::uint32_t>> ranked;
  const std::size_t rows = queries.cluster.size();
  for (std::size_t i = 0; i < rows; ++i) {
    const double* q = queries.latent.data() + i * p.dim;
    ranked.clear();
    for (auto j : members[queries.cluster[i]]) {
      const double* x = passages.latent.data() + static_cast<std::size_t>(j) * p.dim;
      double s = 0.0;
      for (std::size_t t = 0; t < p.dim; ++t) {
        s += q[t] * x[t];
      }
      ranked.emplace_back(-s, j);
    }
    const std::size_t keep = std::min(p.degree, ranked.size());
    std::partial_sort(ranked.begin(), ranked.begin() + static_cast<std::ptrdiff_t>(keep),
                      ranked.end());
    for (std::size_t r = 0; r < keep; ++r) {
      pairs.emplace_back(static_cast<std::uint32_t>(i), ranked[r].second);
    }
  }
  return RelevanceMatrix::from_pairs(pairs, rows, passages.cluster.size());
}

}  // namespace

void SyntheticParams::validate() const {
  auto require = [](bool ok, const std::string& what) {
    if (!ok) {
      throw UsageError("synthetic: " + what);
    }
  };
  require(n >= 1, "n must be >= 1");
  require(m_train >= 1, "m_train must be >= 1");
  require(m_test >= 1, "m_test must be >= 1 (empty evaluation set)");
  require(dim >= 1, "dim must be >= 1");
  require(clusters >= 1, "clusters must be >= 1");
  require(degree >= 1, "degree must be >= 1");
  require(noise >= 0.0 && noise_erm >= 0.0, "noise levels must be non-negative");
}

Dataset gen_synthetic(const SyntheticParams& p) {
  p.validate();
  Rng rng(p.seed);
  std::normal_distribution<double> gauss(0.0, 1.0);

  std::vector<double> centers(p.clusters * p.dim);
  for (std::size_t c = 0; c < p.clusters; ++c) {
    std::vector<double> center(p.dim);
    for (double& x : center) {
      x = gauss(rng);
    }
    normalize_in_place(center);
    std::copy(center.begin(), center.end(), centers.begin() + c * p.dim);
  }

  // Passages are spread round-robin so no cluster is empty when n >= clusters.
  const Population passages = draw_population(p.n, true, p, centers, rng);
  const Population train = draw_population(p.m_train, false, p, centers, rng);
  const Population test = draw_population(p.m_test, false, p, centers, rng);

  std::vector<std::vector<std::uint32_t>> members(p.clusters);
  for (std::size_t j = 0; j < p.n; ++j) {
    members[passages.cluster[j]].push_back(static_cast<std::uint32_t>(j));
  }

  Dataset ds{passages.observed, train.observed, test.observed,
             relevance_by_latent(train, passages, members, p),
             relevance_by_latent(test, passages, members, p)};
  ds.validate_shapes();
  return ds;
}

RelevanceMatrix subsample_supervision(const RelevanceMatrix& y, double ratio, std::uint64_t seed) {
  if (!(ratio >= 0.0 && ratio <= 1.0)) {
    throw UsageError("subsample: ratio must lie in [0, 1], got " + std::to_string(ratio));
  }
  auto pairs = y.pairs();
  const auto keep = static_cast<std::size_t>(std::floor(ratio * static_cast<double>(pairs.size())));
  Rng rng(seed);
  // Partial Fisher-Yates: the first `keep` slots form a uniform sample.
  for (std::size_t i = 0; i < keep; ++i) {
    std::uniform_int_distribution<std::size_t> pick(i, pairs.size() - 1);
    std::swap(pairs[i], pairs[pick(rng)]);
  }
  pairs.resize(keep);
  return RelevanceMatrix::from_pairs(pairs, y.n_queries(), y.n_passages());
}

}  // namespace pefa
