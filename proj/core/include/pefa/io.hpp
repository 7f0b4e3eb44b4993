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

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "pefa/dataset.hpp"
#include "pefa/embedding_matrix.hpp"
#include "pefa/hnsw_index.hpp"
#include "pefa/relevance_matrix.hpp"
#include "pefa/scored_list.hpp"
#include "pefa/sweep.hpp"

// On-disk formats. All integers and floats are little-endian.
//
// Embeddings:  "PEFAEMB1" | u32 rows | u32 dim | rows*dim f32, row-major
// HNSW index:  "PEFAHNSW" | u32 version=1 | u32 M | u32 efC | u64 seed |
//              u32 nodes | u32 dim | u32 entry point | u32 level[nodes] |
//              for layer 0..max level, for each node with level >= layer:
//                u32 degree | u32 ids[degree]
//              | embedded embedding payload (PEFAEMB1 layout)
// Relevance:   text lines "qid<TAB>pid" (0-based, '#' comments), or binary
//              u32 (qid, pid) pairs.
// Predictions: text lines "qid<TAB>pid<TAB>rank<TAB>score", rank 1-based.
//
// Every writer also emits "<file>.sha256"; readers verify it when present.
namespace pefa::io {

inline constexpr std::string_view kEmbeddingMagic = "PEFAEMB1";
inline constexpr std::string_view kHnswMagic = "PEFAHNSW";
inline constexpr std::uint32_t kHnswVersion = 1;

struct EmbeddingReadOptions {
  bool validate_unit_norm = true;
  /// Renormalize rows instead of rejecting them (implies no validation failure).
  bool normalize = false;
};

std::vector<std::byte> encode_embeddings(const EmbeddingMatrix& m);
/// Decodes a complete PEFAEMB1 buffer; trailing bytes are an error.
EmbeddingMatrix decode_embeddings(std::span<const std::byte> bytes,
                                  std::string_view source = "<memory>");
void write_embeddings(const EmbeddingMatrix& m, const std::filesystem::path& path);
EmbeddingMatrix read_embeddings(const std::filesystem::path& path,
                                EmbeddingReadOptions options = {});

std::string encode_relevance_tsv(const RelevanceMatrix& y);
void write_relevance_tsv(const RelevanceMatrix& y, const std::filesystem::path& path);
/// Lines may carry an optional third weight column; weights <= 0 drop the pair.
RelevanceMatrix read_relevance_tsv(const std::filesystem::path& path, std::size_t n_queries,
                                   std::size_t n_passages);
/// Shape inferred as (max qid + 1, max pid + 1).
RelevanceMatrix read_relevance_tsv(const std::filesystem::path& path);
void write_relevance_bin(const RelevanceMatrix& y, const std::filesystem::path& path);
RelevanceMatrix read_relevance_bin(const std::filesystem::path& path, std::size_t n_queries,
                                   std::size_t n_passages);

std::vector<std::byte> encode_hnsw(const HnswIndex& index);
HnswIndex decode_hnsw(std::span<const std::byte> bytes, std::string_view source = "<memory>");
void write_hnsw(const HnswIndex& index, const std::filesystem::path& path);
HnswIndex read_hnsw(const std::filesystem::path& path);

void write_predictions_tsv(std::span<const ScoredList> predictions, std::ostream& out);
/// n_queries == 0 infers the count from the largest qid.
std::vector<ScoredList> read_predictions_tsv(const std::filesystem::path& path,
                                             std::size_t n_queries = 0);

inline constexpr std::array<std::string_view, 5> kDatasetFiles = {
    "passages.emb", "queries_train.emb", "queries_test.emb", "relevance_train.tsv",
    "gold_test.tsv"};

void write_dataset(const Dataset& data, const std::filesystem::path& dir);
/// Loads and cross-validates a dataset directory. A missing file raises a
/// DataError listing every expected filename.
Dataset bundle_dataset(const std::filesystem::path& dir, EmbeddingReadOptions options = {});

/// Ordered key=value text metadata.
using Metadata = std::vector<std::pair<std::string, std::string>>;
void write_metadata(const Metadata& meta, const std::filesystem::path& path);
Metadata read_metadata(const std::filesystem::path& path);
std::optional<std::string> lookup(const Metadata& meta, std::string_view key);

/// Writes bytes plus the "<path>.sha256" sidecar.
void write_file(const std::filesystem::path& path, std::span<const std::byte> bytes);
/// Reads a file and verifies its sidecar digest when one exists.
std::vector<std::byte> read_file(const std::filesystem::path& path);

/// Built index directory.
///   erm: passages.hnsw, meta.txt
///   xs:  passages.hnsw (fused rows), meta.txt with lambda and zero_rows
///   xl:  passages.hnsw, queries.hnsw, relevance.bin, meta.txt
struct IndexBundle {
  Mode mode = Mode::erm;
  std::shared_ptr<const HnswIndex> passages;
  std::shared_ptr<const HnswIndex> queries;
  std::optional<RelevanceMatrix> relevance;
  float lambda = 1.0f;
  std::size_t zero_rows = 0;
  Metadata extra;  // provenance entries appended to meta.txt
};

void save_index_bundle(const IndexBundle& bundle, const std::filesystem::path& dir);
IndexBundle load_index_bundle(const std::filesystem::path& dir);

}  // namespace pefa::io
