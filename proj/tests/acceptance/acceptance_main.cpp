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


// Acceptance suite. Prints one PASS/FAIL line per criterion and exits
// non-zero when any criterion fails. Arguments select a subset by number.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <memory>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "pefa/error.hpp"
#include "pefa/eval.hpp"
#include "pefa/exact_search.hpp"
#include "pefa/fusion.hpp"
#include "pefa/io.hpp"
#include "pefa/mips_index.hpp"
#include "pefa/sweep.hpp"
#include "pefa/synthetic.hpp"
#include "test_support.hpp"

namespace pefa::acceptance {
namespace {

using testing::random_relevance;
using testing::random_unit_matrix;
using Clock = std::chrono::steady_clock;

// Pinned tolerances and thresholds.
constexpr double kXsScoreTolerance = 1e-5;
constexpr double kScoreUpperSlack = 1e-5;
constexpr std::size_t kOracleTopk = 100;
constexpr std::size_t kFuzzInstances = 20;
constexpr std::size_t kFuzzQueries = 50;
constexpr double kXsOracleSeconds = 60.0;
constexpr double kXlOracleSeconds = 120.0;
constexpr double kHnswMinRecall = 0.95;
constexpr double kHnswEfSlack = 0.01;
constexpr double kHnswSeconds = 120.0;
constexpr double kErmRecallLow = 0.4;
constexpr double kErmRecallHigh = 0.7;
constexpr double kXlMinGain = 0.05;
constexpr double kXsMinGain = 0.02;
constexpr double kRowSlack = 0.02;
constexpr double kSaturationGap = 0.02;
constexpr double kSupervisionSlack = 0.02;
constexpr double kXsLatencyBand = 0.25;
constexpr std::size_t kLatencyPassages = 100000;
constexpr std::size_t kLatencyTrainQueries = 20000;
constexpr std::size_t kLatencyQueries = 1000;
constexpr std::size_t kLatencyRounds = 5;
constexpr std::size_t kReductionQueries = 100;
constexpr std::size_t kPersistenceQueries = 100;

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* format, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, format, args...);
  return buf;
}

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

// ------------------------------------------------------------ fuzz instances

struct FuzzInstance {
  std::shared_ptr<const EmbeddingMatrix> passages;
  std::shared_ptr<const EmbeddingMatrix> train;
  RelevanceMatrix y;
  EmbeddingMatrix queries;
};

FuzzInstance make_fuzz(std::size_t index) {
  static constexpr std::size_t kDims[] = {8, 16, 32};
  const std::size_t d = kDims[index % 3];
  const std::size_t n = 500 + (index * 173) % 1501;   // <= 2000
  const std::size_t m = std::min<std::size_t>(3000, n + n / 2);
  const std::uint64_t seed = 1000 + 17 * index;
  return {std::make_shared<const EmbeddingMatrix>(random_unit_matrix(n, d, seed)),
          std::make_shared<const EmbeddingMatrix>(random_unit_matrix(m, d, seed + 1)),
          random_relevance(m, n, 5, seed + 2), random_unit_matrix(kFuzzQueries, d, seed + 3)};
}

const std::vector<FuzzInstance>& fuzz_instances() {
  static const std::vector<FuzzInstance> all = [] {
    std::vector<FuzzInstance> out;
    for (std::size_t i = 0; i < kFuzzInstances; ++i) out.push_back(make_fuzz(i));
    return out;
  }();
  return all;
}

// Extremes of every fused score seen by criteria 1 and 2.
struct ScoreRange {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  std::size_t count = 0;
  void add(double s) {
    lo = std::min(lo, s);
    hi = std::max(hi, s);
    ++count;
  }
};
ScoreRange g_scores;

Outcome criterion_xs_oracle() {
  const auto start = Clock::now();
  std::size_t checked = 0, mismatched = 0;
  double worst = 0.0;
  std::string first_issue;
  for (std::size_t t = 0; t < kFuzzInstances; ++t) {
    const auto& in = fuzz_instances()[t];
    for (float lambda : {0.1f, 0.5f, 0.9f}) {
      const auto fused = build_xs_embeddings(*in.passages, *in.train, in.y, lambda);
      for (std::size_t i = 0; i < in.queries.rows(); ++i) {
        const auto q = in.queries.row(i);
        const auto oracle_scores = exact::pefa_xs_scores(q, *in.passages, *in.train, in.y, lambda);
        for (float s : oracle_scores) g_scores.add(s);
        const auto expected = exact::rank(oracle_scores, kOracleTopk);
        const auto got = exact::topk(fused, q, kOracleTopk);
        for (const auto& e : got) g_scores.add(e.score);
        ++checked;
        bool same = got.ids() == expected.ids();
        for (std::size_t r = 0; same && r < got.size(); ++r) {
          const double diff = std::abs(double(got[r].score) - double(expected[r].score));
          worst = std::max(worst, diff);
          same = diff <= kXsScoreTolerance;
        }
        if (!same) {
          ++mismatched;
          if (first_issue.empty()) {
            std::size_t r = 0;
            while (r + 1 < got.size() && got[r].id == expected[r].id) ++r;
            first_issue = fmt("; first mismatch instance %zu lambda %.1f query %zu rank %zu: "
                              "expected id %u (%.9g), got id %u (%.9g)",
                              t, double(lambda), i, r, expected[r].id, double(expected[r].score),
                              got[r].id, double(got[r].score));
          }
        }
      }
    }
  }
  const double secs = seconds_since(start);
  return {mismatched == 0 && secs < kXsOracleSeconds,
          fmt("%zu/%zu top-%zu lists identical, max |score diff| %.2e, %.1fs", checked - mismatched,
              checked, kOracleTopk, worst, secs) +
              first_issue};
}

Outcome criterion_xl_oracle() {
  const auto start = Clock::now();
  std::size_t checked = 0, mismatched = 0;
  for (std::size_t t = 0; t < kFuzzInstances; ++t) {
    const auto& in = fuzz_instances()[t];
    const XlIndexPair pair(std::make_shared<FlatIndex>(in.passages),
                           std::make_shared<FlatIndex>(in.train), in.y);
    for (float lambda : {0.1f, 0.5f, 0.9f}) {
      for (std::size_t k : {1u, 16u, 32u}) {
        FusionConfig cfg;
        cfg.lambda = lambda;
        cfg.k = k;
        cfg.candidate_budget = in.passages->rows();
        for (std::size_t i = 0; i < in.queries.rows(); ++i) {
          const auto q = in.queries.row(i);
          const auto oracle_scores =
              exact::pefa_xl_scores(q, *in.passages, *in.train, in.y, lambda, k);
          for (float s : oracle_scores) g_scores.add(s);
          const auto got = xl_search(q, pair, cfg, kOracleTopk);
          for (const auto& e : got) g_scores.add(e.score);
          ++checked;
          mismatched += !(got == exact::rank(oracle_scores, kOracleTopk));
        }
      }
    }
  }
  const double secs = seconds_since(start);
  return {mismatched == 0 && secs < kXlOracleSeconds,
          fmt("%zu/%zu top-%zu lists identical (ids, order, scores), %.1fs", checked - mismatched,
              checked, kOracleTopk, secs)};
}

Outcome criterion_score_bounds() {
  if (g_scores.count == 0) {
    return {false, "no fuzz scores recorded (run criteria 1 and 2 first)"};
  }
  const bool ok = g_scores.lo >= -1.0 && g_scores.hi <= 1.0 + kScoreUpperSlack;
  return {ok, fmt("%zu scores in [%.6f, %.6f]", g_scores.count, g_scores.lo, g_scores.hi)};
}

// ---------------------------------------------------------- default dataset

const Dataset& default_dataset() {
  static const Dataset data = gen_synthetic(SyntheticParams{});
  return data;
}

EmbeddingMatrix first_rows(const EmbeddingMatrix& m, std::size_t rows) {
  rows = std::min(rows, m.rows());
  const auto values = m.data().subspan(0, rows * m.dim());
  return EmbeddingMatrix(rows, m.dim(), {values.begin(), values.end()});
}

std::string tsv_of(const std::vector<ScoredList>& lists) {
  std::ostringstream out;
  io::write_predictions_tsv(lists, out);
  return out.str();
}

Outcome criterion_lambda_one() {
  const auto& data = default_dataset();
  const auto queries = first_rows(data.test_queries, kReductionQueries);
  const HnswParams params;
  const std::size_t topk = 100, efs = params.ef_search_default;
  auto passages = std::make_shared<const EmbeddingMatrix>(data.passages);
  auto train = std::make_shared<const EmbeddingMatrix>(data.train_queries);
  auto erm = std::make_shared<const HnswIndex>(HnswIndex::build(passages, params));
  const auto erm_tsv = tsv_of(search_batch(*erm, queries, topk, efs, 1));

  const XsIndex xs = build_xs_index(data.passages, data.train_queries, data.train_relevance, 1.0f,
                                    params);
  const auto xs_tsv = tsv_of(search_batch(xs.index, queries, topk, efs, 1));

  const XlIndexPair pair(erm, std::make_shared<const HnswIndex>(HnswIndex::build(train, params)),
                         data.train_relevance);
  FusionConfig cfg;
  cfg.lambda = 1.0f;
  cfg.ef_search = efs;
  const auto xl_tsv = tsv_of(xl_search_batch(queries, pair, cfg, topk, 1));

  const bool ok = !erm_tsv.empty() && xs_tsv == erm_tsv && xl_tsv == erm_tsv;
  return {ok, fmt("%zu queries: xs TSV %s, xl TSV %s erm TSV (%zu bytes)", queries.rows(),
                  xs_tsv == erm_tsv ? "==" : "!=", xl_tsv == erm_tsv ? "==" : "!=",
                  erm_tsv.size())};
}

Outcome criterion_hnsw_quality() {
  const auto start = Clock::now();
  auto data = std::make_shared<const EmbeddingMatrix>(random_unit_matrix(10000, 16, 4242));
  const auto queries = random_unit_matrix(100, 16, 4343);
  const HnswParams params;  // M=32, efC=500, efS=300
  const auto index = HnswIndex::build(data, params);
  auto recall = [&](std::size_t ef) {
    double total = 0.0;
    for (std::size_t i = 0; i < queries.rows(); ++i) {
      const auto truth_ids = exact::topk(*data, queries.row(i), 10).ids();
      const std::set<std::uint32_t> truth(truth_ids.begin(), truth_ids.end());
      for (auto id : index.search(queries.row(i), 10, ef).ids()) total += truth.count(id);
    }
    return total / (10.0 * static_cast<double>(queries.rows()));
  };
  const double at300 = recall(params.ef_search_default);
  const double at50 = recall(50);
  const double secs = seconds_since(start);
  const bool ok = at300 >= kHnswMinRecall && at50 <= at300 + kHnswEfSlack && secs < kHnswSeconds;
  return {ok, fmt("recall@10 efS=300 %.4f, efS=50 %.4f, %.1fs", at300, at50, secs)};
}

// ------------------------------------------------------- synthetic benefits

const SweepTable& default_sweep() {
  static const SweepTable table = [] {
    SweepConfig cfg;  // lambdas 0.1..0.9, k 16/32/64, ks 10/100, M=32 efC=500 efS=300
    cfg.modes = {Mode::xs, Mode::xl};
    return sweep(default_dataset(), cfg);
  }();
  return table;
}

// The lambda whose best XL row (over k) has the highest Recall@10.
float best_xl_lambda(const SweepTable& table) {
  float best = 1.0f;
  double best_recall = -1.0;
  for (const auto& row : table.rows) {
    if (row.mode == Mode::xl && table.recall(row, 10) > best_recall) {
      best_recall = table.recall(row, 10);
      best = row.lambda;
    }
  }
  return best;
}

Outcome criterion_benefit() {
  const auto& table = default_sweep();
  const double erm = table.recall(table.baseline(), 10);
  double best_xs = 0.0, best_xl = 0.0, worst_gap = std::numeric_limits<double>::infinity();
  for (const auto& row : table.rows) {
    const double r = table.recall(row, 10);
    if (row.mode == Mode::xs) best_xs = std::max(best_xs, r);
    if (row.mode == Mode::xl) best_xl = std::max(best_xl, r);
    if (row.mode != Mode::erm) worst_gap = std::min(worst_gap, r - erm);
  }
  const bool ok = erm >= kErmRecallLow && erm <= kErmRecallHigh && best_xl >= erm + kXlMinGain &&
                  best_xs >= erm + kXsMinGain && worst_gap >= -kRowSlack;
  return {ok, fmt("erm R@10 %.4f, best xl %.4f (%+.4f), best xs %.4f (%+.4f), worst row %+.4f",
                  erm, best_xl, best_xl - erm, best_xs, best_xs - erm, worst_gap)};
}

Outcome criterion_saturation() {
  const auto& table = default_sweep();
  const float lambda = best_xl_lambda(table);
  const auto* k32 = table.find(Mode::xl, lambda, 32);
  const auto* k64 = table.find(Mode::xl, lambda, 64);
  if (!k32 || !k64) return {false, "missing k=32 or k=64 row"};
  const double r32 = table.recall(*k32, 10), r64 = table.recall(*k64, 10);
  return {std::abs(r32 - r64) <= kSaturationGap,
          fmt("best lambda %.1f: R@10 k=32 %.4f, k=64 %.4f", double(lambda), r32, r64)};
}

Outcome criterion_supervision() {
  const auto& table = default_sweep();
  const double erm = table.recall(table.baseline(), 10);
  const float lambda = best_xl_lambda(table);
  auto xl_recall = [&](double ratio) {
    Dataset data = default_dataset();
    data.train_relevance = subsample_supervision(data.train_relevance, ratio, 5);
    SweepConfig cfg;
    cfg.modes = {Mode::xl};
    cfg.lambdas = {lambda};
    cfg.knns = {32};
    cfg.ks = {10};
    const auto t = sweep(data, cfg);
    return t.recall(*t.find(Mode::xl, lambda, 32), 10);
  };
  const double low = xl_recall(0.05);
  const double full = xl_recall(1.0);
  return {low > erm && full >= low - kSupervisionSlack,
          fmt("lambda %.1f k=32: R@10 ratio 0.05 %.4f, ratio 1.0 %.4f, erm %.4f", double(lambda),
              low, full, erm)};
}

// ------------------------------------------------------------------ latency

Outcome criterion_latency() {
  SyntheticParams p;
  p.n = kLatencyPassages;
  p.m_train = kLatencyTrainQueries;
  p.m_test = kLatencyQueries;
  p.clusters = kLatencyPassages / 25;
  const Dataset data = gen_synthetic(p);
  const HnswParams params;
  auto passages = std::make_shared<const EmbeddingMatrix>(data.passages);
  auto train = std::make_shared<const EmbeddingMatrix>(data.train_queries);
  auto erm = std::make_shared<const HnswIndex>(HnswIndex::build(passages, params));
  const XsIndex xs = build_xs_index(data.passages, data.train_queries, data.train_relevance, 0.5f,
                                    params);
  const XlIndexPair pair(erm, std::make_shared<const HnswIndex>(HnswIndex::build(train, params)),
                         data.train_relevance);
  FusionConfig cfg;
  cfg.lambda = 0.5f;
  cfg.k = 32;
  const std::size_t topk = 100, efs = params.ef_search_default;

  // Mean single-threaded milliseconds per query for one pass over the queries.
  auto pass = [&](const std::function<ScoredList(std::span<const float>)>& search) {
    std::size_t sink = 0;
    const auto start = Clock::now();
    for (std::size_t i = 0; i < data.test_queries.rows(); ++i) {
      sink += search(data.test_queries.row(i)).size();
    }
    const double ms = 1e3 * seconds_since(start) / static_cast<double>(data.test_queries.rows());
    return sink > 0 ? ms : -1.0;
  };
  const auto erm_fn = [&](std::span<const float> q) { return erm->search(q, topk, efs); };
  const auto xs_fn = [&](std::span<const float> q) { return xs.index.search(q, topk, efs); };
  const auto xl_fn = [&](std::span<const float> q) { return xl_search(q, pair, cfg, topk); };

  pass(erm_fn), pass(xs_fn), pass(xl_fn);  // warm-up
  std::vector<double> erm_ms, xs_ms, xl_ms;
  for (std::size_t round = 0; round < kLatencyRounds; ++round) {
    erm_ms.push_back(pass(erm_fn));
    xs_ms.push_back(pass(xs_fn));
    xl_ms.push_back(pass(xl_fn));
  }
  auto median = [](std::vector<double> v) {
    std::sort(v.begin(), v.end());
    return v[v.size() / 2];
  };
  const double e = median(erm_ms), s = median(xs_ms), l = median(xl_ms);
  const double rel = std::abs(s - e) / e;
  return {l > s && rel < kXsLatencyBand,
          fmt("n=%zu ms/query (median of %zu rounds): erm %.4f, xs %.4f, xl %.4f; |xs-erm|/erm "
              "%.3f, xl/xs %.2f",
              p.n, kLatencyRounds, e, s, l, rel, l / s)};
}

// -------------------------------------------------------------- persistence

Outcome criterion_persistence() {
  const auto& data = default_dataset();
  testing::TempDir dir("acceptance");
  io::write_dataset(data, dir / "data");
  const Dataset back = io::bundle_dataset(dir / "data");
  const bool data_ok = back.passages == data.passages && back.train_queries == data.train_queries &&
                       back.test_queries == data.test_queries &&
                       back.train_relevance == data.train_relevance &&
                       back.test_gold == data.test_gold;
  io::write_relevance_bin(data.train_relevance, dir / "y.bin");
  const bool bin_ok = io::read_relevance_bin(dir / "y.bin", data.train_relevance.n_queries(),
                                             data.train_relevance.n_passages()) ==
                      data.train_relevance;

  const auto queries = first_rows(data.test_queries, kPersistenceQueries);
  const HnswParams params;

  XsIndex xs = build_xs_index(data.passages, data.train_queries, data.train_relevance, 0.3f,
                              params);
  io::IndexBundle xs_bundle;
  xs_bundle.mode = Mode::xs;
  xs_bundle.lambda = xs.lambda;
  xs_bundle.zero_rows = xs.zero_rows;
  xs_bundle.passages = std::make_shared<const HnswIndex>(std::move(xs.index));
  io::save_index_bundle(xs_bundle, dir / "xs");
  const auto xs_loaded = io::load_index_bundle(dir / "xs");
  const bool xs_ok =
      xs_loaded.lambda == xs_bundle.lambda &&
      tsv_of(search_batch(*xs_loaded.passages, queries, 100, 300, 1)) ==
          tsv_of(search_batch(*xs_bundle.passages, queries, 100, 300, 1));

  auto passages = std::make_shared<const EmbeddingMatrix>(data.passages);
  auto train = std::make_shared<const EmbeddingMatrix>(data.train_queries);
  io::IndexBundle xl_bundle;
  xl_bundle.mode = Mode::xl;
  xl_bundle.passages = std::make_shared<const HnswIndex>(HnswIndex::build(passages, params));
  xl_bundle.queries = std::make_shared<const HnswIndex>(HnswIndex::build(train, params));
  xl_bundle.relevance = data.train_relevance;
  io::save_index_bundle(xl_bundle, dir / "xl");
  const auto xl_loaded = io::load_index_bundle(dir / "xl");
  FusionConfig cfg;
  cfg.lambda = 0.3f;
  const XlIndexPair before(xl_bundle.passages, xl_bundle.queries, *xl_bundle.relevance);
  const XlIndexPair after(xl_loaded.passages, xl_loaded.queries, *xl_loaded.relevance);
  const bool xl_ok = tsv_of(xl_search_batch(queries, after, cfg, 100, 1)) ==
                     tsv_of(xl_search_batch(queries, before, cfg, 100, 1));
  const bool erm_ok = tsv_of(search_batch(*xl_loaded.passages, queries, 100, 300, 1)) ==
                      tsv_of(search_batch(*xl_bundle.passages, queries, 100, 300, 1));

  auto word = [](bool b) { return b ? "ok" : "MISMATCH"; };
  return {data_ok && bin_ok && xs_ok && xl_ok && erm_ok,
          fmt("dataset %s, relevance.bin %s, xs index %s, xl pair %s, erm index %s on %zu queries",
              word(data_ok), word(bin_ok), word(xs_ok), word(xl_ok), word(erm_ok),
              queries.rows())};
}

struct Criterion {
  int id;
  const char* name;
  Outcome (*run)();
};

}  // namespace
}  // namespace pefa::acceptance

int main(int argc, char** argv) {
  using namespace pefa::acceptance;
  const std::vector<Criterion> criteria{
      {1, "XS oracle equivalence", criterion_xs_oracle},
      {2, "XL oracle equivalence", criterion_xl_oracle},
      {3, "lambda=1 reduction", criterion_lambda_one},
      {4, "HNSW quality", criterion_hnsw_quality},
      {5, "fused score bounds", criterion_score_bounds},
      {6, "benefit on synthetic data", criterion_benefit},
      {7, "k saturation", criterion_saturation},
      {8, "supervision curve", criterion_supervision},
      {9, "latency ordering", criterion_latency},
      {10, "persistence round trips", criterion_persistence},
  };
  std::set<int> selected;
  for (int i = 1; i < argc; ++i) selected.insert(std::atoi(argv[i]));
  if (selected.count(5)) {
    selected.insert({1, 2});  // bounds are collected while running 1 and 2
  }

  int failures = 0;
  for (const auto& c : criteria) {
    if (!selected.empty() && !selected.count(c.id)) continue;
    Outcome outcome;
    try {
      outcome = c.run();
    } catch (const std::exception& e) {
      outcome = {false, std::string("exception: ") + e.what()};
    }
    failures += !outcome.pass;
    std::printf("[%s] %2d %s: %s\n", outcome.pass ? "PASS" : "FAIL", c.id, c.name,
                outcome.detail.c_str());
    std::fflush(stdout);
  }
  return failures == 0 ? 0 : 1;
}
