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

#include "pefa/io.hpp"

#include <algorithm>
#include <bit>
#include <charconv>
#include <chrono>
#include <cstdio>
#include <cstring>
#include <ctime>
#include <fstream>
#include <iterator>
#include <limits>
#include <map>
#include <ostream>
#include <sstream>

#include "pefa/digest.hpp"
#include "pefa/error.hpp"
#include "pefa/log.hpp"

namespace pefa::io {
namespace {

namespace fs = std::filesystem;

class ByteWriter {
 public:
  void put_u32(std::uint32_t v) {
    for (int b = 0; b < 4; ++b) {
      bytes_.push_back(static_cast<std::byte>((v >> (8 * b)) & 0xff));
    }
  }
  void put_u64(std::uint64_t v) {
    for (int b = 0; b < 8; ++b) {
      bytes_.push_back(static_cast<std::byte>((v >> (8 * b)) & 0xff));
    }
  }
  void put_f32(float v) { put_u32(std::bit_cast<std::uint32_t>(v)); }
  void put_text(std::string_view s) {
    for (char c : s) {
      bytes_.push_back(static_cast<std::byte>(c));
    }
  }
  void put_bytes(std::span<const std::byte> b) { bytes_.insert(bytes_.end(), b.begin(), b.end()); }

  std::vector<std::byte> take() { return std::move(bytes_); }

 private:
  std::vector<std::byte> bytes_;
};

class ByteReader {
 public:
  ByteReader(std::span<const std::byte> bytes, std::string_view source)
      : bytes_(bytes), source_(source) {}

  std::size_t offset() const noexcept { return offset_; }
  std::size_t remaining() const noexcept { return bytes_.size() - offset_; }

  void need(std::uint64_t count, std::string_view what) const {
    if (count > remaining()) {
      throw TruncatedFileError(source_ + ": truncated " + std::string(what) + ": expected " +
                               std::to_string(offset_ + count) + " bytes, file has " +
                               std::to_string(bytes_.size()));
    }
  }

  std::uint32_t u32(std::string_view what) {
    need(4, what);
    std::uint32_t v = 0;
    for (int b = 0; b < 4; ++b) {
      v |= static_cast<std::uint32_t>(bytes_[offset_ + b]) << (8 * b);
    }
    offset_ += 4;
    return v;
  }
  std::uint64_t u64(std::string_view what) {
    need(8, what);
    std::uint64_t v = 0;
    for (int b = 0; b < 8; ++b) {
      v |= static_cast<std::uint64_t>(bytes_[offset_ + b]) << (8 * b);
    }
    offset_ += 8;
    return v;
  }
  float f32(std::string_view what) { return std::bit_cast<float>(u32(what)); }
  std::string text(std::size_t count, std::string_view what) {
    need(count, what);
    std::string s(count, '\0');
    std::memcpy(s.data(), bytes_.data() + offset_, count);
    offset_ += count;
    return s;
  }
  std::span<const std::byte> rest() const { return bytes_.subspan(offset_); }
  void skip(std::size_t count) { offset_ += count; }

  const std::string& source() const noexcept { return source_; }

 private:
  std::span<const std::byte> bytes_;
  std::string source_;
  std::size_t offset_ = 0;
};

void check_magic(const std::string& magic, std::string_view expected, const std::string& source) {
  if (magic == expected) {
    return;
  }
  // Same family, different version suffix.
  if (magic.compare(0, expected.size() - 1, expected.substr(0, expected.size() - 1)) == 0) {
    throw UnsupportedVersionError(source + ": unsupported format version '" + magic +
                                  "' (expected '" + std::string(expected) + "')");
  }
  throw BadMagicError(source + ": bad magic, expected '" + std::string(expected) + "'");
}

std::uint32_t checked_u32(std::size_t v, std::string_view what) {
  if (v > std::numeric_limits<std::uint32_t>::max()) {
    throw DataError(std::string(what) + " does not fit in 32 bits");
  }
  return static_cast<std::uint32_t>(v);
}

EmbeddingMatrix read_embedding_block(ByteReader& in) {
  check_magic(in.text(kEmbeddingMagic.size(), "magic"), kEmbeddingMagic, in.source());
  const std::uint32_t rows = in.u32("header");
  const std::uint32_t dim = in.u32("header");
  if (dim == 0) {
    throw DataError(in.source() + ": embedding dim is 0");
  }
  std::uint64_t values = 0;
  std::uint64_t payload = 0;
  if (__builtin_mul_overflow(static_cast<std::uint64_t>(rows), static_cast<std::uint64_t>(dim),
                             &values) ||
      __builtin_mul_overflow(values, std::uint64_t{4}, &payload) ||
      payload > std::numeric_limits<std::size_t>::max()) {
    throw DataError(in.source() + ": rows * dim overflows (" + std::to_string(rows) + " x " +
                    std::to_string(dim) + ")");
  }
  in.need(payload, "embedding payload");
  std::vector<float> data(static_cast<std::size_t>(values));
  for (auto& x : data) {
    x = in.f32("embedding payload");
  }
  return EmbeddingMatrix(rows, dim, std::move(data));
}

void write_embedding_block(ByteWriter& out, const EmbeddingMatrix& m) {
  out.put_text(kEmbeddingMagic);
  out.put_u32(checked_u32(m.rows(), "row count"));
  out.put_u32(checked_u32(m.dim(), "dim"));
  for (float x : m.data()) {
    out.put_f32(x);
  }
}

fs::path sidecar_path(const fs::path& path) {
  fs::path p = path;
  p += ".sha256";
  return p;
}

std::string slurp_text(const fs::path& path) {
  const auto bytes = read_file(path);
  return std::string(reinterpret_cast<const char*>(bytes.data()), bytes.size());
}

void write_text(const fs::path& path, std::string_view text) {
  write_file(path, std::as_bytes(std::span(text.data(), text.size())));
}

template <typename T>
bool parse_number(std::string_view field, T& value) {
  if (field.empty()) {
    return false;
  }
  const auto* end = field.data() + field.size();
  auto [ptr, ec] = std::from_chars(field.data(), end, value);
  return ec == std::errc() && ptr == end;
}

bool parse_float(std::string_view field, double& value) {
  // std::from_chars for floating point is incomplete in some toolchains.
  std::string copy(field);
  char* end = nullptr;
  value = std::strtod(copy.c_str(), &end);
  return !copy.empty() && end == copy.c_str() + copy.size();
}

std::vector<std::string_view> split_tabs(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    const auto tab = line.find('\t', start);
    fields.push_back(line.substr(start, tab == std::string_view::npos ? line.npos : tab - start));
    if (tab == std::string_view::npos) {
      break;
    }
    start = tab + 1;
  }
  return fields;
}

template <typename Fn>
void for_each_line(const std::string& text, Fn&& fn) {
  std::size_t line_no = 0;
  std::size_t start = 0;
  while (start < text.size()) {
    auto end = text.find('\n', start);
    if (end == std::string::npos) {
      end = text.size();
    }
    std::string_view line(text.data() + start, end - start);
    if (!line.empty() && line.back() == '\r') {
      line.remove_suffix(1);
    }
    ++line_no;
    if (!line.empty() && line.front() != '#') {
      fn(line_no, line);
    }
    start = end + 1;
  }
}

std::vector<RelevancePair> parse_relevance_pairs(const fs::path& path) {
  const std::string text = slurp_text(path);
  std::vector<RelevancePair> pairs;
  for_each_line(text, [&](std::size_t line_no, std::string_view line) {
    const auto fields = split_tabs(line);
    std::uint32_t q = 0;
    std::uint32_t p = 0;
    double weight = 1.0;
    const bool ok = (fields.size() == 2 || fields.size() == 3) && parse_number(fields[0], q) &&
                    parse_number(fields[1], p) &&
                    (fields.size() == 2 || parse_float(fields[2], weight));
    if (!ok) {
      throw DataError(path.string() + ":" + std::to_string(line_no) +
                      ": expected '<qid>\\t<pid>', got '" + std::string(line) + "'");
    }
    if (weight > 0.0) {
      pairs.emplace_back(q, p);
    }
  });
  return pairs;
}

std::string format_float(float v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.9g", static_cast<double>(v));
  return buf;
}

std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::string require_key(const Metadata& meta, std::string_view key, const fs::path& path) {
  auto v = lookup(meta, key);
  if (!v) {
    throw DataError(path.string() + ": missing key '" + std::string(key) + "'");
  }
  return *v;
}

std::size_t parse_count(const std::string& text, std::string_view key) {
  std::size_t v = 0;
  if (!parse_number(std::string_view(text), v)) {
    throw DataError("metadata: bad value for " + std::string(key) + ": '" + text + "'");
  }
  return v;
}

}  // namespace

void write_file(const fs::path& path, std::span<const std::byte> bytes) {
  {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
      throw DataError("cannot open " + path.string() + " for writing");
    }
    out.write(reinterpret_cast<const char*>(bytes.data()),
              static_cast<std::streamsize>(bytes.size()));
    if (!out) {
      throw DataError("failed writing " + path.string());
    }
  }
  std::ofstream digest(sidecar_path(path), std::ios::trunc);
  digest << sha256_hex(bytes) << "  " << path.filename().string() << "\n";
  if (!digest) {
    throw DataError("failed writing digest for " + path.string());
  }
}

std::vector<std::byte> read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw DataError("cannot open " + path.string());
  }
  std::vector<char> raw((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  std::vector<std::byte> bytes(raw.size());
  std::memcpy(bytes.data(), raw.data(), raw.size());

  const auto sidecar = sidecar_path(path);
  if (fs::exists(sidecar)) {
    std::ifstream d(sidecar);
    std::string expected;
    d >> expected;
    const auto actual = sha256_hex(bytes);
    if (expected != actual) {
      throw DigestMismatchError(path.string() + ": sha256 mismatch (sidecar " + expected +
                                ", content " + actual + ")");
    }
  }
  return bytes;
}

std::vector<std::byte> encode_embeddings(const EmbeddingMatrix& m) {
  ByteWriter out;
  write_embedding_block(out, m);
  return out.take();
}

EmbeddingMatrix decode_embeddings(std::span<const std::byte> bytes, std::string_view source) {
  ByteReader in(bytes, source);
  auto m = read_embedding_block(in);
  if (in.remaining() != 0) {
    throw DataError(std::string(source) + ": " + std::to_string(in.remaining()) +
                    " trailing bytes after embedding payload");
  }
  return m;
}

void write_embeddings(const EmbeddingMatrix& m, const fs::path& path) {
  write_file(path, encode_embeddings(m));
}

EmbeddingMatrix read_embeddings(const fs::path& path, EmbeddingReadOptions options) {
  auto raw = decode_embeddings(read_file(path), path.string());
  if (options.normalize) {
    const auto values = raw.data();
    return EmbeddingMatrix::ingest(raw.rows(), raw.dim(), {values.begin(), values.end()},
                                   {.normalize = true});
  }
  if (options.validate_unit_norm) {
    try {
      raw.validate_unit_norm();
    } catch (const DataError& e) {
      throw DataError(path.string() + ": " + e.what());
    }
  }
  return raw;
}

std::string encode_relevance_tsv(const RelevanceMatrix& y) {
  std::string out;
  for (const auto& [q, p] : y.pairs()) {
    out += std::to_string(q) + '\t' + std::to_string(p) + '\n';
  }
  return out;
}

void write_relevance_tsv(const RelevanceMatrix& y, const fs::path& path) {
  write_text(path, encode_relevance_tsv(y));
}

RelevanceMatrix read_relevance_tsv(const fs::path& path, std::size_t n_queries,
                                   std::size_t n_passages) {
  const auto pairs = parse_relevance_pairs(path);
  try {
    return RelevanceMatrix::from_pairs(pairs, n_queries, n_passages);
  } catch (const DataError& e) {
    throw DataError(path.string() + ": " + e.what());
  }
}

RelevanceMatrix read_relevance_tsv(const fs::path& path) {
  const auto pairs = parse_relevance_pairs(path);
  std::size_t m = 0;
  std::size_t n = 0;
  for (const auto& [q, p] : pairs) {
    m = std::max<std::size_t>(m, q + std::size_t{1});
    n = std::max<std::size_t>(n, p + std::size_t{1});
  }
  return RelevanceMatrix::from_pairs(pairs, m, n);
}

void write_relevance_bin(const RelevanceMatrix& y, const fs::path& path) {
  ByteWriter out;
  for (const auto& [q, p] : y.pairs()) {
    out.put_u32(q);
    out.put_u32(p);
  }
  write_file(path, out.take());
}

RelevanceMatrix read_relevance_bin(const fs::path& path, std::size_t n_queries,
                                   std::size_t n_passages) {
  const auto bytes = read_file(path);
  if (bytes.size() % 8 != 0) {
    throw TruncatedFileError(path.string() + ": size " + std::to_string(bytes.size()) +
                             " is not a multiple of 8 bytes");
  }
  ByteReader in(bytes, path.string());
  std::vector<RelevancePair> pairs(bytes.size() / 8);
  for (auto& [q, p] : pairs) {
    q = in.u32("pair");
    p = in.u32("pair");
  }
  try {
    return RelevanceMatrix::from_pairs(pairs, n_queries, n_passages);
  } catch (const DataError& e) {
    throw DataError(path.string() + ": " + e.what());
  }
}

std::vector<std::byte> encode_hnsw(const HnswIndex& index) {
  const auto& params = index.params();
  const auto& vectors = index.vectors();
  ByteWriter out;
  out.put_text(kHnswMagic);
  out.put_u32(kHnswVersion);
  out.put_u32(params.M);
  out.put_u32(params.ef_construction);
  out.put_u64(params.seed);
  out.put_u32(checked_u32(vectors.rows(), "node count"));
  out.put_u32(checked_u32(vectors.dim(), "dim"));
  out.put_u32(index.entry_point());
  for (auto level : index.levels()) {
    out.put_u32(level);
  }
  const auto n = static_cast<std::uint32_t>(vectors.rows());
  for (int layer = 0; layer <= index.max_level(); ++layer) {
    for (std::uint32_t node = 0; node < n; ++node) {
      if (index.level(node) < layer) {
        continue;
      }
      const auto nbrs = index.neighbors(node, layer);
      out.put_u32(static_cast<std::uint32_t>(nbrs.size()));
      for (auto id : nbrs) {
        out.put_u32(id);
      }
    }
  }
  write_embedding_block(out, vectors);
  return out.take();
}

HnswIndex decode_hnsw(std::span<const std::byte> bytes, std::string_view source) {
  ByteReader in(bytes, source);
  check_magic(in.text(kHnswMagic.size(), "magic"), kHnswMagic, in.source());
  const std::uint32_t version = in.u32("header");
  if (version != kHnswVersion) {
    throw UnsupportedVersionError(in.source() + ": unsupported index version " +
                                  std::to_string(version) + " (this build reads version " +
                                  std::to_string(kHnswVersion) + ")");
  }
  HnswParams params;
  params.M = in.u32("header");
  params.ef_construction = in.u32("header");
  params.seed = in.u64("header");
  const std::uint32_t n = in.u32("header");
  const std::uint32_t dim = in.u32("header");
  const std::uint32_t entry = in.u32("header");

  in.need(static_cast<std::uint64_t>(n) * 4, "level array");
  std::vector<std::uint32_t> levels(n);
  std::uint32_t max_level = 0;
  for (auto& level : levels) {
    level = in.u32("level array");
    max_level = std::max(max_level, level);
  }
  if (max_level > 64) {
    throw DataError(in.source() + ": implausible node level " + std::to_string(max_level));
  }

  std::vector<HnswIndex::NodeLinks> links(n);
  for (std::uint32_t node = 0; node < n; ++node) {
    links[node].resize(levels[node] + 1);
  }
  for (std::uint32_t layer = 0; n > 0 && layer <= max_level; ++layer) {
    for (std::uint32_t node = 0; node < n; ++node) {
      if (levels[node] < layer) {
        continue;
      }
      const std::uint32_t degree = in.u32("adjacency");
      if (degree > params.max_degree(static_cast<int>(layer))) {
        throw DataError(in.source() + ": node " + std::to_string(node) + " degree " +
                        std::to_string(degree) + " exceeds bound at layer " +
                        std::to_string(layer));
      }
      in.need(static_cast<std::uint64_t>(degree) * 4, "adjacency");
      auto& ids = links[node][layer];
      ids.resize(degree);
      for (auto& id : ids) {
        id = in.u32("adjacency");
      }
    }
  }

  auto vectors = std::make_shared<const EmbeddingMatrix>(read_embedding_block(in));
  if (in.remaining() != 0) {
    throw DataError(in.source() + ": " + std::to_string(in.remaining()) +
                    " trailing bytes after index payload");
  }
  if (vectors->rows() != n || vectors->dim() != dim) {
    throw DataError(in.source() + ": header says " + std::to_string(n) + "x" +
                    std::to_string(dim) + " but payload is " + std::to_string(vectors->rows()) +
                    "x" + std::to_string(vectors->dim()));
  }
  return HnswIndex::from_parts(params, std::move(vectors), std::move(levels), links, entry);
}

void write_hnsw(const HnswIndex& index, const fs::path& path) {
  write_file(path, encode_hnsw(index));
}

HnswIndex read_hnsw(const fs::path& path) { return decode_hnsw(read_file(path), path.string()); }

void write_predictions_tsv(std::span<const ScoredList> predictions, std::ostream& out) {
  for (std::size_t q = 0; q < predictions.size(); ++q) {
    std::size_t rank = 0;
    for (const auto& e : predictions[q]) {
      out << q << '\t' << e.id << '\t' << ++rank << '\t' << format_float(e.score) << '\n';
    }
  }
}

std::vector<ScoredList> read_predictions_tsv(const fs::path& path, std::size_t n_queries) {
  const std::string text = slurp_text(path);
  std::map<std::uint32_t, std::vector<std::pair<std::uint32_t, ScoredId>>> by_query;
  for_each_line(text, [&](std::size_t line_no, std::string_view line) {
    const auto fields = split_tabs(line);
    std::uint32_t q = 0;
    std::uint32_t p = 0;
    std::uint32_t rank = 0;
    double score = 0.0;
    if (fields.size() != 4 || !parse_number(fields[0], q) || !parse_number(fields[1], p) ||
        !parse_number(fields[2], rank) || !parse_float(fields[3], score)) {
      throw DataError(path.string() + ":" + std::to_string(line_no) +
                      ": expected '<qid>\\t<pid>\\t<rank>\\t<score>', got '" + std::string(line) +
                      "'");
    }
    by_query[q].push_back({rank, ScoredId{p, static_cast<float>(score)}});
  });
  std::size_t count = n_queries;
  if (count == 0 && !by_query.empty()) {
    count = by_query.rbegin()->first + std::size_t{1};
  }
  std::vector<ScoredList> out(count);
  for (auto& [q, entries] : by_query) {
    if (q >= count) {
      throw DataError(path.string() + ": query id " + std::to_string(q) + " out of range");
    }
    std::sort(entries.begin(), entries.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    std::vector<ScoredId> ranked;
    ranked.reserve(entries.size());
    for (const auto& e : entries) {
      ranked.push_back(e.second);
    }
    try {
      out[q] = ScoredList::from_ranked(std::move(ranked));
    } catch (const InvariantError& e) {
      throw DataError(path.string() + ": query " + std::to_string(q) + ": " + e.what());
    }
  }
  return out;
}

void write_dataset(const Dataset& data, const fs::path& dir) {
  data.validate_shapes();
  fs::create_directories(dir);
  write_embeddings(data.passages, dir / kDatasetFiles[0]);
  write_embeddings(data.train_queries, dir / kDatasetFiles[1]);
  write_embeddings(data.test_queries, dir / kDatasetFiles[2]);
  write_relevance_tsv(data.train_relevance, dir / kDatasetFiles[3]);
  write_relevance_tsv(data.test_gold, dir / kDatasetFiles[4]);
}

Dataset bundle_dataset(const fs::path& dir, EmbeddingReadOptions options) {
  std::vector<std::string> missing;
  for (auto name : kDatasetFiles) {
    if (!fs::is_regular_file(dir / name)) {
      missing.emplace_back(name);
    }
  }
  if (!missing.empty()) {
    std::string expected;
    for (auto name : kDatasetFiles) {
      expected += (expected.empty() ? "" : ", ") + std::string(name);
    }
    std::string absent;
    for (const auto& name : missing) {
      absent += (absent.empty() ? "" : ", ") + name;
    }
    throw DataError(dir.string() + ": missing " + absent + "; a dataset directory must contain " +
                    expected);
  }
  Dataset data;
  data.passages = read_embeddings(dir / kDatasetFiles[0], options);
  data.train_queries = read_embeddings(dir / kDatasetFiles[1], options);
  data.test_queries = read_embeddings(dir / kDatasetFiles[2], options);
  if (data.train_queries.dim() != data.passages.dim() ||
      data.test_queries.dim() != data.passages.dim()) {
    throw DataError(dir.string() + ": shape error: passages have dim " +
                    std::to_string(data.passages.dim()) + ", training queries " +
                    std::to_string(data.train_queries.dim()) + ", test queries " +
                    std::to_string(data.test_queries.dim()));
  }
  data.train_relevance =
      read_relevance_tsv(dir / kDatasetFiles[3], data.train_queries.rows(), data.passages.rows());
  data.test_gold =
      read_relevance_tsv(dir / kDatasetFiles[4], data.test_queries.rows(), data.passages.rows());
  data.validate_shapes();
  return data;
}

void write_metadata(const Metadata& meta, const fs::path& path) {
  std::string text;
  for (const auto& [k, v] : meta) {
    text += k + '=' + v + '\n';
  }
  write_text(path, text);
}

Metadata read_metadata(const fs::path& path) {
  const std::string text = slurp_text(path);
  Metadata meta;
  for_each_line(text, [&](std::size_t line_no, std::string_view line) {
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw DataError(path.string() + ":" + std::to_string(line_no) + ": expected key=value");
    }
    meta.emplace_back(std::string(line.substr(0, eq)), std::string(line.substr(eq + 1)));
  });
  return meta;
}

std::optional<std::string> lookup(const Metadata& meta, std::string_view key) {
  for (const auto& [k, v] : meta) {
    if (k == key) {
      return v;
    }
  }
  return std::nullopt;
}

void save_index_bundle(const IndexBundle& bundle, const fs::path& dir) {
  if (!bundle.passages) {
    throw UsageError("index bundle without a passage index");
  }
  fs::create_directories(dir);
  const auto& params = bundle.passages->params();
  Metadata meta{{"mode", std::string(to_string(bundle.mode))},
                {"n_passages", std::to_string(bundle.passages->size())},
                {"dim", std::to_string(bundle.passages->dim())},
                {"M", std::to_string(params.M)},
                {"efc", std::to_string(params.ef_construction)},
                {"seed", std::to_string(params.seed)}};
  write_hnsw(*bundle.passages, dir / "passages.hnsw");
  if (bundle.mode == Mode::xs) {
    meta.emplace_back("lambda", format_float(bundle.lambda));
    meta.emplace_back("zero_rows", std::to_string(bundle.zero_rows));
  }
  if (bundle.mode == Mode::xl) {
    if (!bundle.queries || !bundle.relevance) {
      throw UsageError("xl bundle requires a query index and a relevance matrix");
    }
    write_hnsw(*bundle.queries, dir / "queries.hnsw");
    write_relevance_bin(*bundle.relevance, dir / "relevance.bin");
    meta.emplace_back("n_train_queries", std::to_string(bundle.queries->size()));
    meta.emplace_back("nnz", std::to_string(bundle.relevance->nnz()));
  }
  meta.emplace_back("built_at", utc_timestamp());
  for (const auto& kv : bundle.extra) {
    meta.push_back(kv);
  }
  write_metadata(meta, dir / "meta.txt");
}

IndexBundle load_index_bundle(const fs::path& dir) {
  const auto meta_path = dir / "meta.txt";
  if (!fs::is_regular_file(meta_path)) {
    throw DataError(dir.string() + ": not an index directory (missing meta.txt)");
  }
  const Metadata meta = read_metadata(meta_path);
  IndexBundle bundle;
  bundle.mode = parse_mode(require_key(meta, "mode", meta_path));
  bundle.passages = std::make_shared<const HnswIndex>(read_hnsw(dir / "passages.hnsw"));
  if (bundle.mode == Mode::xs) {
    double lambda = 0.0;
    const auto text = require_key(meta, "lambda", meta_path);
    if (!parse_float(text, lambda)) {
      throw DataError(meta_path.string() + ": bad lambda '" + text + "'");
    }
    bundle.lambda = static_cast<float>(lambda);
    bundle.zero_rows = parse_count(require_key(meta, "zero_rows", meta_path), "zero_rows");
  }
  if (bundle.mode == Mode::xl) {
    bundle.queries = std::make_shared<const HnswIndex>(read_hnsw(dir / "queries.hnsw"));
    bundle.relevance = read_relevance_bin(dir / "relevance.bin", bundle.queries->size(),
                                          bundle.passages->size());
  }
  for (const auto& [k, v] : meta) {
    if (k.rfind("source_", 0) == 0) {
      bundle.extra.emplace_back(k, v);
    }
  }
  return bundle;
}

}  // namespace pefa::io
