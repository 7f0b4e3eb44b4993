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


#include "pefa/cli.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <memory>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "pefa/digest.hpp"
#include "pefa/error.hpp"
#include "pefa/eval.hpp"
#include "pefa/fusion.hpp"
#include "pefa/io.hpp"
#include "pefa/log.hpp"
#include "pefa/sweep.hpp"
#include "pefa/synthetic.hpp"

namespace pefa::cli {
namespace {

namespace fs = std::filesystem;

struct GlobalOptions {
  std::size_t threads = 0;
  bool normalize = false;
};

io::EmbeddingReadOptions read_options(const GlobalOptions& g) {
  return {.validate_unit_norm = true, .normalize = g.normalize};
}

std::string fixed4(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4f", v);
  return buf;
}

/// Writes text to path, or to out when path is empty.
void emit(const std::string& text, const std::string& path, std::ostream& out) {
  if (path.empty()) {
    out << text;
    out.flush();
    return;
  }
  std::ofstream file(path, std::ios::binary | std::ios::trunc);
  file << text;
  if (!file) {
    throw DataError("failed writing " + path);
  }
}

// ---------------------------------------------------------------- gen-synth

struct GenSynthArgs {
  SyntheticParams params;
  std::string out;
};

void add_gen_synth(CLI::App& app, GenSynthArgs& a) {
  auto* cmd = app.add_subcommand("gen-synth", "Generate a seeded clustered synthetic dataset");
  cmd->add_option("--n", a.params.n, "Number of passages")->capture_default_str();
  cmd->add_option("--m-train", a.params.m_train, "Number of training queries")
      ->capture_default_str();
  cmd->add_option("--m-test", a.params.m_test, "Number of test queries")->capture_default_str();
  cmd->add_option("--d", a.params.dim, "Embedding dimension")->capture_default_str();
  cmd->add_option("--clusters", a.params.clusters, "Number of clusters")->capture_default_str();
  cmd->add_option("--noise", a.params.noise, "Latent noise around cluster centers")
      ->capture_default_str();
  cmd->add_option("--noise-erm", a.params.noise_erm, "Extra noise on observed embeddings")
      ->capture_default_str();
  cmd->add_option("--degree", a.params.degree, "Relevant passages per query")
      ->capture_default_str();
  cmd->add_option("--seed", a.params.seed, "Random seed")->capture_default_str();
  cmd->add_option("--out", a.out, "Output dataset directory")->required();
}

int run_gen_synth(const GenSynthArgs& a, std::ostream& out) {
  const Dataset data = gen_synthetic(a.params);
  io::write_dataset(data, a.out);
  out << "dataset\t" << a.out << "\n"
      << "passages\t" << data.passages.rows() << "\n"
      << "train_queries\t" << data.train_queries.rows() << "\n"
      << "test_queries\t" << data.test_queries.rows() << "\n"
      << "train_pairs\t" << data.train_relevance.nnz() << "\n"
      << "digest\t" << directory_digest(a.out) << "\n";
  return kExitOk;
}

// ------------------------------------------------------------------- build

struct BuildArgs {
  std::string mode;
  std::string data;
  std::optional<float> lambda;
  HnswParams hnsw;
  std::string out;
};

void add_build(CLI::App& app, BuildArgs& a) {
  auto* cmd = app.add_subcommand("build", "Build an erm, xs or xl index from a dataset directory");
  cmd->add_option("--mode", a.mode, "Index kind")
      ->required()
      ->check(CLI::IsMember({"erm", "xs", "xl"}));
  cmd->add_option("--data", a.data, "Dataset directory")->required();
  cmd->add_option("--lambda", a.lambda, "Interpolation weight (xs only; fixed at build time)");
  cmd->add_option("--M", a.hnsw.M, "Max graph degree on upper layers")->capture_default_str();
  cmd->add_option("--efc", a.hnsw.ef_construction, "Construction beam width")
      ->capture_default_str();
  cmd->add_option("--seed", a.hnsw.seed, "Level assignment seed")->capture_default_str();
  cmd->add_option("--out", a.out, "Output index directory")->required();
}

io::Metadata source_digests(const fs::path& dir) {
  io::Metadata extra;
  for (auto name : io::kDatasetFiles) {
    const fs::path path = dir / name;
    std::string key(name.substr(0, name.find('.')));
    extra.emplace_back("source_" + key, sha256_file(path));
  }
  return extra;
}

int run_build(const BuildArgs& a, const GlobalOptions& g, std::ostream& out) {
  const Mode mode = parse_mode(a.mode);
  if (mode == Mode::xs && !a.lambda) {
    throw UsageError("build: --mode xs requires --lambda");
  }
  if (mode == Mode::erm && a.lambda) {
    throw UsageError("build: --lambda does not apply to --mode erm");
  }
  if (mode == Mode::xl && a.lambda) {
    log::warn("build: --lambda is ignored for --mode xl; pass it to search instead");
  }
  if (a.lambda && !(*a.lambda >= 0.0f && *a.lambda <= 1.0f)) {
    throw UsageError("build: --lambda must lie in [0, 1]");
  }
  a.hnsw.validate();

  const Dataset data = io::bundle_dataset(a.data, read_options(g));
  io::IndexBundle bundle;
  bundle.mode = mode;
  bundle.extra = source_digests(a.data);

  auto passages = std::make_shared<const EmbeddingMatrix>(data.passages);
  switch (mode) {
    case Mode::erm:
      bundle.passages = std::make_shared<const HnswIndex>(HnswIndex::build(passages, a.hnsw));
      break;
    case Mode::xs: {
      XsIndex xs = build_xs_index(data.passages, data.train_queries, data.train_relevance,
                                  *a.lambda, a.hnsw);
      bundle.lambda = xs.lambda;
      bundle.zero_rows = xs.zero_rows;
      bundle.passages = std::make_shared<const HnswIndex>(std::move(xs.index));
      if (bundle.zero_rows > 0) {
        log::info("build: " + std::to_string(bundle.zero_rows) +
                  " passages have no relevant training query");
      }
      break;
    }
    case Mode::xl: {
      auto train = std::make_shared<const EmbeddingMatrix>(data.train_queries);
      bundle.passages = std::make_shared<const HnswIndex>(HnswIndex::build(passages, a.hnsw));
      bundle.queries = std::make_shared<const HnswIndex>(HnswIndex::build(train, a.hnsw));
      bundle.relevance = data.train_relevance;
      break;
    }
  }
  io::save_index_bundle(bundle, a.out);
  out << "index\t" << a.out << "\n"
      << "mode\t" << to_string(mode) << "\n"
      << "passages\t" << bundle.passages->size() << "\n"
      << "edges\t" << bundle.passages->edge_count() << "\n";
  if (bundle.queries) {
    out << "train_queries\t" << bundle.queries->size() << "\n";
  }
  return kExitOk;
}

// ------------------------------------------------------------------ search

struct SearchArgs {
  std::string index;
  std::string queries;
  std::size_t topk = 100;
  std::size_t efs = 300;
  std::optional<float> lambda;
  std::optional<std::size_t> k;
  std::optional<std::size_t> budget;
  bool report_latency = false;
  std::string out;
};

void add_search(CLI::App& app, SearchArgs& a) {
  auto* cmd = app.add_subcommand("search", "Search a built index with a query embedding file");
  cmd->add_option("--index", a.index, "Index directory")->required();
  cmd->add_option("--queries", a.queries, "Query embeddings (PEFAEMB1)")->required();
  cmd->add_option("--topk", a.topk, "Results per query")->capture_default_str();
  cmd->add_option("--efs", a.efs, "Search beam width")->capture_default_str();
  cmd->add_option("--lambda", a.lambda, "Interpolation weight (xl only, default 0.5)");
  cmd->add_option("--k", a.k, "Nearest training queries (xl only, default 32)");
  cmd->add_option("--budget", a.budget,
                  "Passage candidates rescored (xl only, default max(topk, 300))");
  cmd->add_flag("--report-latency", a.report_latency,
                "Print single-threaded per-query latency to stderr");
  cmd->add_option("--out", a.out, "Output TSV (default stdout)");
}

struct Latency {
  double mean_ms = 0.0;
  double median_ms = 0.0;
};

template <typename Fn>
Latency time_queries(std::size_t count, Fn&& fn) {
  std::vector<double> ms(count);
  for (std::size_t i = 0; i < count; ++i) {
    const auto start = std::chrono::steady_clock::now();
    fn(i);
    ms[i] = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start)
                .count();
  }
  Latency lat;
  if (count == 0) {
    return lat;
  }
  double sum = 0.0;
  for (double v : ms) {
    sum += v;
  }
  lat.mean_ms = sum / static_cast<double>(count);
  std::sort(ms.begin(), ms.end());
  lat.median_ms = count % 2 ? ms[count / 2] : 0.5 * (ms[count / 2 - 1] + ms[count / 2]);
  return lat;
}

int run_search(const SearchArgs& a, const GlobalOptions& g, std::ostream& out,
               std::ostream& err) {
  if (a.topk == 0) {
    throw UsageError("search: --topk must be >= 1");
  }
  if (a.efs == 0) {
    throw UsageError("search: --efs must be >= 1");
  }
  const io::IndexBundle bundle = io::load_index_bundle(a.index);
  if (bundle.mode != Mode::xl && (a.lambda || a.k || a.budget)) {
    throw UsageError("search: --lambda, --k and --budget apply only to xl indices; this index is " +
                     std::string(to_string(bundle.mode)));
  }
  const EmbeddingMatrix queries = io::read_embeddings(a.queries, read_options(g));
  if (queries.dim() != bundle.passages->dim()) {
    throw DataError("search: query dim " + std::to_string(queries.dim()) + " != index dim " +
                    std::to_string(bundle.passages->dim()));
  }

  std::vector<ScoredList> results;
  std::optional<Latency> latency;
  if (bundle.mode == Mode::xl) {
    const XlIndexPair pair(bundle.passages, bundle.queries, *bundle.relevance);
    FusionConfig cfg;
    cfg.lambda = a.lambda.value_or(cfg.lambda);
    cfg.k = a.k.value_or(cfg.k);
    cfg.candidate_budget = a.budget.value_or(0);
    cfg.ef_search = a.efs;
    if (cfg.k > pair.n_train_queries()) {
      log::warn("search: --k " + std::to_string(cfg.k) + " exceeds the " +
                std::to_string(pair.n_train_queries()) + " training queries; clamped");
      cfg.k = pair.n_train_queries();
    }
    cfg.validate(a.topk);
    if (a.report_latency) {
      results.resize(queries.rows());
      latency = time_queries(queries.rows(), [&](std::size_t i) {
        results[i] = xl_search(queries.row(i), pair, cfg, a.topk);
      });
    } else {
      results = xl_search_batch(queries, pair, cfg, a.topk, g.threads);
    }
  } else {
    const HnswIndex& index = *bundle.passages;
    if (a.report_latency) {
      results.resize(queries.rows());
      latency = time_queries(queries.rows(), [&](std::size_t i) {
        results[i] = index.search(queries.row(i), a.topk, a.efs);
      });
    } else {
      results = search_batch(index, queries, a.topk, a.efs, g.threads);
    }
  }

  std::ostringstream tsv;
  io::write_predictions_tsv(results, tsv);
  emit(tsv.str(), a.out, out);
  if (latency) {
    char line[128];
    std::snprintf(line, sizeof line, "latency_ms\tmean=%.4f\tmedian=%.4f\tqueries=%zu\n",
                  latency->mean_ms, latency->median_ms, queries.rows());
    err << line;
  }
  return kExitOk;
}

// -------------------------------------------------------------------- eval

struct EvalArgs {
  std::string pred;
  std::string gold;
  std::vector<std::size_t> ks{10, 100};
  std::string out;
};

void add_eval(CLI::App& app, EvalArgs& a) {
  auto* cmd = app.add_subcommand("eval", "Mean Recall@k of a prediction TSV against gold pairs");
  cmd->add_option("--pred", a.pred, "Prediction TSV (qid pid rank score)")->required();
  cmd->add_option("--gold", a.gold, "Gold relevance TSV (qid pid)")->required();
  cmd->add_option("--ks", a.ks, "Comma separated cutoffs")->delimiter(',')->capture_default_str();
  cmd->add_option("--out", a.out, "Output TSV (default stdout)");
}

int run_eval(const EvalArgs& a, std::ostream& out) {
  std::vector<ScoredList> preds = io::read_predictions_tsv(a.pred);
  const RelevanceMatrix inferred = io::read_relevance_tsv(a.gold);
  std::size_t n_passages = inferred.n_passages();
  for (const auto& list : preds) {
    for (const auto& e : list) {
      n_passages = std::max<std::size_t>(n_passages, std::size_t{e.id} + 1);
    }
  }
  const std::size_t n_queries = std::max(preds.size(), inferred.n_queries());
  preds.resize(n_queries);
  const RelevanceMatrix gold = io::read_relevance_tsv(a.gold, n_queries, n_passages);
  const EvalResult result = evaluate(preds, gold, a.ks);

  std::string text = "metric\tvalue\n";
  for (std::size_t c = 0; c < result.ks.size(); ++c) {
    text += "recall@" + std::to_string(result.ks[c]) + "\t" + fixed4(result.mean_recall[c]) + "\n";
  }
  text += "evaluated\t" + std::to_string(result.evaluated) + "\n";
  text += "skipped\t" + std::to_string(result.skipped) + "\n";
  emit(text, a.out, out);
  return kExitOk;
}

// ------------------------------------------------------------------- sweep

struct SweepArgs {
  std::string data;
  std::vector<std::string> modes{"xs", "xl"};
  SweepConfig config;
  double supervision_ratio = 1.0;
  std::uint64_t supervision_seed = 0;
  std::string out;
};

void add_sweep(CLI::App& app, SweepArgs& a) {
  auto* cmd = app.add_subcommand("sweep", "Recall table over a lambda x k grid (ERM baseline first)");
  cmd->add_option("--data", a.data, "Dataset directory")->required();
  cmd->add_option("--modes", a.modes, "Comma separated subset of xs,xl")
      ->delimiter(',')
      ->check(CLI::IsMember({"erm", "xs", "xl"}))
      ->capture_default_str();
  cmd->add_option("--lambdas", a.config.lambdas, "Comma separated interpolation weights")
      ->delimiter(',')
      ->capture_default_str();
  cmd->add_option("--knns", a.config.knns, "Comma separated neighbor counts (xl)")
      ->delimiter(',')
      ->capture_default_str();
  cmd->add_option("--ks", a.config.ks, "Comma separated recall cutoffs")
      ->delimiter(',')
      ->capture_default_str();
  cmd->add_option("--M", a.config.hnsw.M, "Max graph degree on upper layers")
      ->capture_default_str();
  cmd->add_option("--efc", a.config.hnsw.ef_construction, "Construction beam width")
      ->capture_default_str();
  cmd->add_option("--efs", a.config.ef_search, "Search beam width")->capture_default_str();
  cmd->add_option("--seed", a.config.hnsw.seed, "Level assignment seed")->capture_default_str();
  cmd->add_option("--budget", a.config.candidate_budget, "xl candidate budget (0: default)")
      ->capture_default_str();
  cmd->add_option("--supervision-ratio", a.supervision_ratio,
                  "Fraction of training pairs kept, sampled uniformly")
      ->capture_default_str();
  cmd->add_option("--supervision-seed", a.supervision_seed, "Seed of the pair subsample")
      ->capture_default_str();
  cmd->add_option("--out", a.out, "Output TSV (default stdout)");
}

int run_sweep(SweepArgs a, const GlobalOptions& g, std::ostream& out) {
  a.config.modes.clear();
  for (const auto& m : a.modes) {
    const Mode mode = parse_mode(m);
    if (mode != Mode::erm) {
      a.config.modes.push_back(mode);
    }
  }
  for (float lambda : a.config.lambdas) {
    if (!(lambda >= 0.0f && lambda <= 1.0f)) {
      throw UsageError("sweep: every lambda must lie in [0, 1]");
    }
  }
  for (std::size_t k : a.config.knns) {
    if (k == 0) {
      throw UsageError("sweep: every k must be >= 1");
    }
  }
  a.config.hnsw.validate();
  a.config.threads = g.threads;

  Dataset data = io::bundle_dataset(a.data, read_options(g));
  if (a.supervision_ratio != 1.0) {
    data.train_relevance =
        subsample_supervision(data.train_relevance, a.supervision_ratio, a.supervision_seed);
  }
  const std::size_t m = data.train_queries.rows();
  for (auto& k : a.config.knns) {
    if (k > m) {
      log::warn("sweep: k " + std::to_string(k) + " exceeds the " + std::to_string(m) +
                " training queries; clamped");
      k = m;
    }
  }
  emit(sweep(data, a.config).to_tsv(), a.out, out);
  return kExitOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"PEFA: parameter-free adaptation of embedding retrieval over HNSW indices", "pefa"};
  app.require_subcommand(1);
  app.fallthrough();
  app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);

  GlobalOptions global;
  app.add_option("--threads", global.threads, "Worker threads for batch work (0: all cores)")
      ->capture_default_str();
  app.add_flag("--normalize", global.normalize,
               "Renormalize input embeddings instead of rejecting non-unit rows");

  GenSynthArgs gen;
  BuildArgs build;
  SearchArgs search;
  EvalArgs eval;
  SweepArgs sweep_args;
  add_gen_synth(app, gen);
  add_build(app, build);
  add_search(app, search);
  add_eval(app, eval);
  add_sweep(app, sweep_args);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err) == 0 ? kExitOk : kExitUsage;
  }

  log::configure_from_env();
  try {
    if (app.got_subcommand("gen-synth")) return run_gen_synth(gen, out);
    if (app.got_subcommand("build")) return run_build(build, global, out);
    if (app.got_subcommand("search")) return run_search(search, global, out, err);
    if (app.got_subcommand("eval")) return run_eval(eval, out);
    if (app.got_subcommand("sweep")) return run_sweep(sweep_args, global, out);
    throw UsageError("no subcommand");
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const DataError& e) {
    err << "data error: " << e.what() << "\n";
    return kExitData;
  } catch (const fs::filesystem_error& e) {
    err << "data error: " << e.what() << "\n";
    return kExitData;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << "\n";
    return kExitInternal;
  }
}

}  // namespace pefa::cli
