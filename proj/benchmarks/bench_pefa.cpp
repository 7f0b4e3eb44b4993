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


// Single-threaded query latency of the three retrieval modes on a seeded
// synthetic corpus, plus index build time. PEFA_BENCH_N sets the passage
// count of the latency corpus (default 20000).

#include <benchmark/benchmark.h>

#include <cstdlib>
#include <memory>
#include <string>

#include "pefa/fusion.hpp"
#include "pefa/hnsw_index.hpp"
#include "pefa/synthetic.hpp"

namespace {

using namespace pefa;

std::size_t corpus_size() {
  if (const char* env = std::getenv("PEFA_BENCH_N")) {
    return std::stoul(env);
  }
  return 20000;
}

struct Corpus {
  Dataset data;
  std::shared_ptr<const HnswIndex> erm;
  std::unique_ptr<XsIndex> xs;
  std::unique_ptr<XlIndexPair> xl;
};

const Corpus& corpus() {
  static const Corpus c = [] {
    SyntheticParams p;
    p.n = corpus_size();
    p.m_train = 2 * p.n;
    p.m_test = 1000;
    p.clusters = p.n / 25;
    Corpus out{gen_synthetic(p), nullptr, nullptr, nullptr};
    const HnswParams params;
    auto passages = std::make_shared<const EmbeddingMatrix>(out.data.passages);
    auto train = std::make_shared<const EmbeddingMatrix>(out.data.train_queries);
    out.erm = std::make_shared<const HnswIndex>(HnswIndex::build(passages, params));
    out.xs = std::make_unique<XsIndex>(build_xs_index(
        out.data.passages, out.data.train_queries, out.data.train_relevance, 0.5f, params));
    auto query_index = std::make_shared<const HnswIndex>(HnswIndex::build(train, params));
    out.xl = std::make_unique<XlIndexPair>(out.erm, query_index, out.data.train_relevance);
    return out;
  }();
  return c;
}

void BM_ErmSearch(benchmark::State& state) {
  const auto& c = corpus();
  const auto topk = static_cast<std::size_t>(state.range(0));
  std::size_t i = 0;
  for (auto _ : state) {
    const auto q = c.data.test_queries.row(i++ % c.data.test_queries.rows());
    benchmark::DoNotOptimize(c.erm->search(q, topk, 300));
  }
}

void BM_XsSearch(benchmark::State& state) {
  const auto& c = corpus();
  const auto topk = static_cast<std::size_t>(state.range(0));
  std::size_t i = 0;
  for (auto _ : state) {
    const auto q = c.data.test_queries.row(i++ % c.data.test_queries.rows());
    benchmark::DoNotOptimize(c.xs->index.search(q, topk, 300));
  }
}

void BM_XlSearch(benchmark::State& state) {
  const auto& c = corpus();
  const auto topk = static_cast<std::size_t>(state.range(0));
  FusionConfig cfg;
  cfg.lambda = 0.5f;
  cfg.k = static_cast<std::size_t>(state.range(1));
  std::size_t i = 0;
  for (auto _ : state) {
    const auto q = c.data.test_queries.row(i++ % c.data.test_queries.rows());
    benchmark::DoNotOptimize(xl_search(q, *c.xl, cfg, topk));
  }
}

void BM_HnswBuild(benchmark::State& state) {
  SyntheticParams p;
  p.n = static_cast<std::size_t>(state.range(0));
  p.m_train = 1;
  p.m_test = 1;
  p.clusters = std::max<std::size_t>(1, p.n / 25);
  auto passages = std::make_shared<const EmbeddingMatrix>(gen_synthetic(p).passages);
  for (auto _ : state) {
    benchmark::DoNotOptimize(HnswIndex::build(passages, HnswParams{}));
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(p.n));
}

BENCHMARK(BM_ErmSearch)->Arg(10)->Arg(100)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_XsSearch)->Arg(10)->Arg(100)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_XlSearch)->Args({10, 16})->Args({10, 32})->Args({100, 32})->Args({100, 64})
    ->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_HnswBuild)->Arg(2000)->Arg(10000)->Unit(benchmark::kMillisecond)->Iterations(1);

}  // namespace

BENCHMARK_MAIN();
