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


#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <set>
#include <vector>

#include "pefa/embedding_matrix.hpp"
#include "pefa/error.hpp"
#include "pefa/relevance_matrix.hpp"
#include "pefa/scored_list.hpp"
#include "pefa/vector_ops.hpp"
#include "test_support.hpp"

namespace pefa {
namespace {

using testing::random_unit_matrix;
using testing::random_unit_vector;

TEST(L2Normalize, ThreeFourFive) {
  const std::vector<float> v{3.0f, 4.0f};
  const auto out = l2_normalize(v);
  EXPECT_FALSE(out.was_zero);
  EXPECT_FLOAT_EQ(out.values[0], 0.6f);
  EXPECT_FLOAT_EQ(out.values[1], 0.8f);
}

TEST(L2Normalize, UnitVectorUnchanged) {
  const std::vector<float> v{1.0f, 0.0f};
  const auto out = l2_normalize(v);
  EXPECT_FALSE(out.was_zero);
  EXPECT_EQ(out.values, v);
}

TEST(L2Normalize, ZeroVectorIsFlagged) {
  const std::vector<float> v{0.0f, 0.0f};
  const auto out = l2_normalize(v);
  EXPECT_TRUE(out.was_zero);
  EXPECT_EQ(out.values, (std::vector<float>{0.0f, 0.0f}));
}

TEST(L2Normalize, TinyNormCountsAsZero) {
  const std::vector<float> v{1e-13f, 0.0f, 0.0f};
  EXPECT_TRUE(l2_normalize(v).was_zero);
}

TEST(L2Normalize, IdempotentOnRandomVectors) {
  std::mt19937_64 rng(11);
  std::normal_distribution<float> gauss(0.0f, 3.0f);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<float> v(1 + trial % 40);
    for (auto& x : v) x = gauss(rng);
    const auto once = l2_normalize(v);
    if (once.was_zero) continue;
    const auto twice = l2_normalize(once.values);
    ASSERT_FALSE(twice.was_zero);
    for (std::size_t t = 0; t < v.size(); ++t) {
      EXPECT_LT(std::abs(once.values[t] - twice.values[t]), 1e-6f);
    }
    EXPECT_NEAR(l2_norm(once.values), 1.0, 1e-6);
  }
}

TEST(Dot, Orthogonal) {
  const std::vector<float> u{1.0f, 0.0f}, v{0.0f, 1.0f};
  EXPECT_EQ(dot(u, v), 0.0f);
}

TEST(Dot, UnitSelfSimilarity) {
  const std::vector<float> u{0.6f, 0.8f};
  EXPECT_FLOAT_EQ(dot(u, u), 1.0f);
}

TEST(Dot, DimensionMismatchThrows) {
  const std::vector<float> u{1.0f, 2.0f}, v{1.0f, 2.0f, 3.0f};
  EXPECT_THROW(dot(u, v), UsageError);
}

TEST(Dot, MatchesNaiveAccumulation) {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 100; ++trial) {
    const auto u = random_unit_vector(64, rng);
    const auto v = random_unit_vector(64, rng);
    double naive = 0.0;
    for (std::size_t t = 0; t < 64; ++t) naive += static_cast<double>(u[t]) * v[t];
    EXPECT_NEAR(dot(u, v), naive, 1e-6);
  }
}

TEST(Dot, SymmetricBitForBit) {
  std::mt19937_64 rng(6);
  for (int trial = 0; trial < 500; ++trial) {
    const std::size_t dim = 1 + trial % 70;
    const auto u = random_unit_vector(dim, rng);
    const auto v = random_unit_vector(dim, rng);
    EXPECT_EQ(dot(u, v), dot(v, u));
  }
}

TEST(Dot, UncheckedKernelAgreesWithDot) {
  std::mt19937_64 rng(8);
  for (std::size_t dim = 1; dim < 20; ++dim) {
    const auto u = random_unit_vector(dim, rng);
    const auto v = random_unit_vector(dim, rng);
    EXPECT_EQ(detail::dot_unchecked(u.data(), v.data(), dim), dot(u, v));
  }
}

TEST(EmbeddingMatrix, ShapeChecked) {
  EXPECT_THROW(EmbeddingMatrix(2, 3, std::vector<float>(5)), DataError);
  EXPECT_THROW(EmbeddingMatrix(0, 0, {}), DataError);
  const EmbeddingMatrix empty(0, 4, {});
  EXPECT_TRUE(empty.empty());
  EXPECT_EQ(empty.dim(), 4u);
}

TEST(EmbeddingMatrix, IngestRejectsNonUnitRow) {
  try {
    EmbeddingMatrix::ingest(2, 2, {1.0f, 0.0f, 2.0f, 0.0f});
    FAIL() << "expected DataError";
  } catch (const DataError& e) {
    EXPECT_NE(std::string(e.what()).find("row 1"), std::string::npos) << e.what();
  }
}

TEST(EmbeddingMatrix, IngestAcceptsWithinTolerance) {
  const auto m = EmbeddingMatrix::ingest(1, 2, {1.0005f, 0.0f});
  EXPECT_EQ(m.rows(), 1u);
}

TEST(EmbeddingMatrix, NormalizeFlagsZeroRows) {
  const auto m =
      EmbeddingMatrix::ingest(3, 2, {3.0f, 4.0f, 0.0f, 0.0f, 0.0f, 2.0f}, {.normalize = true});
  ASSERT_EQ(m.zero_rows().size(), 1u);
  EXPECT_EQ(m.zero_rows()[0], 1u);
  EXPECT_FLOAT_EQ(m.row(0)[0], 0.6f);
  EXPECT_EQ(m.row(2)[1], 1.0f);
  EXPECT_NO_THROW(m.validate_unit_norm());
}

TEST(EmbeddingMatrix, NormalizedIngestAlwaysValidates) {
  std::mt19937_64 rng(21);
  std::normal_distribution<float> gauss(0.0f, 10.0f);
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t rows = 1 + trial * 7, dim = 1 + trial % 9;
    std::vector<float> data(rows * dim);
    for (auto& x : data) x = gauss(rng);
    if (trial % 3 == 0) std::fill_n(data.begin(), dim, 0.0f);
    const auto m = EmbeddingMatrix::ingest(rows, dim, data, {.normalize = true});
    EXPECT_NO_THROW(m.validate_unit_norm());
  }
}

std::set<RelevancePair> as_set(const std::vector<RelevancePair>& pairs) {
  return {pairs.begin(), pairs.end()};
}

TEST(RelevanceMatrix, DuplicatesCollapse) {
  const std::vector<RelevancePair> pairs{{0, 1}, {0, 1}, {2, 0}};
  const auto y = RelevanceMatrix::from_pairs(pairs, 3, 2);
  EXPECT_EQ(y.nnz(), 2u);
  EXPECT_TRUE(y.contains(0, 1));
  EXPECT_TRUE(y.contains(2, 0));
  EXPECT_FALSE(y.contains(1, 0));
  EXPECT_EQ(y.col(0).size(), 1u);
  EXPECT_EQ(y.col(0)[0], 2u);
}

TEST(RelevanceMatrix, EmptyMatrix) {
  const auto y = RelevanceMatrix::from_pairs({}, 5, 5);
  EXPECT_EQ(y.nnz(), 0u);
  for (std::size_t j = 0; j < 5; ++j) EXPECT_TRUE(y.col(j).empty());
  for (std::size_t i = 0; i < 5; ++i) EXPECT_TRUE(y.row(i).empty());
}

TEST(RelevanceMatrix, OutOfRangeNamesPair) {
  const std::vector<RelevancePair> pairs{{0, 0}, {1, 7}};
  try {
    RelevanceMatrix::from_pairs(pairs, 2, 3);
    FAIL() << "expected DataError";
  } catch (const DataError& e) {
    EXPECT_NE(std::string(e.what()).find("(1, 7)"), std::string::npos) << e.what();
  }
  const std::vector<RelevancePair> bad_query{{2, 0}};
  EXPECT_THROW(RelevanceMatrix::from_pairs(bad_query, 2, 3), DataError);
}

TEST(RelevanceMatrix, RowAndColumnViewsAgree) {
  std::mt19937_64 rng(3);
  std::uniform_int_distribution<std::uint32_t> qi(0, 99), pj(0, 49);
  for (int trial = 0; trial < 10; ++trial) {
    std::vector<RelevancePair> pairs(1000);
    for (auto& p : pairs) p = {qi(rng), pj(rng)};
    const auto y = RelevanceMatrix::from_pairs(pairs, 100, 50);

    // Independent walk over both orientations.
    std::set<RelevancePair> by_row, by_col;
    for (std::uint32_t i = 0; i < 100; ++i) {
      for (auto j : y.row(i)) by_row.insert({i, j});
    }
    for (std::uint32_t j = 0; j < 50; ++j) {
      for (auto i : y.col(j)) by_col.insert({i, j});
    }
    EXPECT_EQ(by_row, by_col);
    EXPECT_EQ(by_row, as_set(pairs));
    EXPECT_EQ(y.pairs(), y.pairs_by_column());
    EXPECT_EQ(y.nnz(), by_row.size());
  }
}

TEST(RelevanceMatrix, SlicesAscending) {
  const auto y = testing::random_relevance(40, 30, 6, 17);
  for (std::size_t i = 0; i < y.n_queries(); ++i) {
    EXPECT_TRUE(std::is_sorted(y.row(i).begin(), y.row(i).end()));
  }
  for (std::size_t j = 0; j < y.n_passages(); ++j) {
    const auto c = y.col(j);
    EXPECT_TRUE(std::adjacent_find(c.begin(), c.end(), std::greater_equal<>()) == c.end());
  }
}

TEST(ScoredList, TopKOrdersByScoreThenId) {
  const auto list = ScoredList::top_k({{4, 0.5f}, {1, 0.9f}, {3, 0.5f}, {2, 0.1f}}, 3);
  ASSERT_EQ(list.size(), 3u);
  EXPECT_EQ(list.ids(), (std::vector<std::uint32_t>{1, 3, 4}));
}

TEST(ScoredList, TopKSaturates) {
  const auto list = ScoredList::top_k({{0, 0.1f}, {1, 0.2f}}, 10);
  EXPECT_EQ(list.ids(), (std::vector<std::uint32_t>{1, 0}));
}

TEST(ScoredList, RejectsDuplicatesAndDisorder) {
  EXPECT_THROW(ScoredList::top_k({{1, 0.5f}, {1, 0.4f}}, 2), InvariantError);
  EXPECT_THROW(ScoredList::from_ranked({{1, 0.1f}, {2, 0.5f}}), InvariantError);
  EXPECT_THROW(ScoredList::from_ranked({{2, 0.5f}, {1, 0.5f}}), InvariantError);
  EXPECT_NO_THROW(ScoredList::from_ranked({{1, 0.5f}, {2, 0.5f}}));
}

TEST(ScoredList, TruncateKeepsPrefix) {
  auto list = ScoredList::top_k({{0, 0.3f}, {1, 0.2f}, {2, 0.1f}}, 3);
  list.truncate(2);
  EXPECT_EQ(list.ids(), (std::vector<std::uint32_t>{0, 1}));
  list.truncate(5);
  EXPECT_EQ(list.size(), 2u);
}

TEST(ScoredList, TopKMatchesFullSort) {
  std::mt19937_64 rng(2);
  std::uniform_int_distribution<int> coarse(0, 20);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<ScoredId> items(300);
    for (std::uint32_t j = 0; j < items.size(); ++j) {
      items[j] = {j, static_cast<float>(coarse(rng)) / 20.0f};  // many ties
    }
    std::shuffle(items.begin(), items.end(), rng);
    auto sorted = items;
    std::stable_sort(sorted.begin(), sorted.end(), [](const ScoredId& a, const ScoredId& b) {
      return a.score != b.score ? a.score > b.score : a.id < b.id;
    });
    sorted.resize(37);
    EXPECT_EQ(ScoredList::top_k(items, 37).entries(), sorted);
  }
}

TEST(RandomUnitMatrix, RowsAreUnit) {
  const auto m = random_unit_matrix(50, 7, 1);
  EXPECT_NO_THROW(m.validate_unit_norm(1e-6));
}

}  // namespace
}  // namespace pefa
