#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <unordered_set>
#include <vector>

#include "entikit/common.hpp"
#include "entikit/providers.hpp"

namespace entikit::synth {

struct SourceDocument {
  std::string doc_id;
  std::string title;
  std::string author;
  int year = 0;
  std::string text;
  std::int64_t token_count = 0;

  void validate() const;  // non-empty text, token_count > 0
};

/// Salient entities extracted from one document; order is the extraction
/// order with case-insensitive duplicates removed.
struct EntitySet {
  std::string doc_id;
  std::string summary;
  std::vector<std::string> entities;
};

struct ExtractResult {
  EntitySet set;
  int retry_count = 0;  // parse failures absorbed before success
};

enum class SynthKind {
  entigraph_pair,
  entigraph_triplet,
  rephrase_easy,
  rephrase_medium,
  rephrase_hard,
  qa_sft,
};

std::string_view to_string(SynthKind kind);
SynthKind synth_kind_from_string(std::string_view name);

struct SyntheticDocument {
  std::string synth_id;  // deterministic task id, hex
  std::string doc_id;
  SynthKind kind = SynthKind::entigraph_pair;
  std::vector<std::string> entity_subset;  // empty for rephrase/qa kinds
  std::string text;
  std::int64_t token_count = 0;
  bool token_count_estimated = false;
  std::string model_id;
  double temperature = 0.0;
  std::string created_at;

  std::string to_jsonl() const;
  static SyntheticDocument from_jsonl(std::string_view line);
};

// Source corpus JSONL I/O.
std::vector<SourceDocument> read_source_corpus(const std::filesystem::path& path);
void write_source_corpus(std::span<const SourceDocument> docs,
                         const std::filesystem::path& path);
std::vector<EntitySet> read_entity_sets(const std::filesystem::path& path);
void write_entity_sets(std::span<const EntitySet> sets,
                       const std::filesystem::path& path);

/// Deterministic task id: hash of (doc_id, kind, sorted entity subset,
/// sample index). Reruns resume cleanly by skipping existing ids.
std::string synth_task_id(std::string_view doc_id, SynthKind kind,
                          std::span<const std::string> entity_subset,
                          std::uint64_t sample_index = 0);

/// Sends the entity-extraction prompt and parses the {"summary", "entities"}
/// JSON body, retrying with a corrective suffix on parse failure. Throws
/// ParseError carrying the raw response after max_retries failures.
ExtractResult extract_entities(const SourceDocument& doc,
                               providers::ChatClient& chat, int max_retries = 3,
                               double temperature = 0.0);

struct RelationTask {
  SynthKind kind = SynthKind::entigraph_pair;
  std::vector<std::uint32_t> entity_indices;  // ascending
};

/// All C(n,2) pairs in lexicographic index order, then
/// min(triplet_budget, C(n,3)) triplets sampled uniformly without
/// replacement under seed (emitted in ascending combination rank).
/// Fewer than two entities yields an empty list.
std::vector<RelationTask> enumerate_relation_tasks(const EntitySet& entities,
                                                   std::uint64_t triplet_budget,
                                                   std::uint64_t seed);

struct GenerationOptions {
  std::string model_id = "mock";
  double temperature = 0.3;  // relation analysis; rephrase/qa pin 1.0
  std::function<std::string()> now = iso_utc_now;
};

SyntheticDocument generate_relation(const SourceDocument& doc,
                                    const EntitySet& entities,
                                    std::span<const std::string> subset,
                                    providers::ChatClient& chat,
                                    const GenerationOptions& options);

enum class RephraseStyle { easy, medium, hard };
RephraseStyle rephrase_style_from_string(std::string_view name);

SyntheticDocument generate_rephrase(const SourceDocument& doc, RephraseStyle style,
                                    std::uint64_t sample_index,
                                    providers::ChatClient& chat,
                                    const GenerationOptions& options);

SyntheticDocument generate_qa_sft(const SourceDocument& doc,
                                  std::uint64_t sample_index,
                                  providers::ChatClient& chat,
                                  const GenerationOptions& options);

/// True when the text carries the "Question:" tag the QA format requires.
bool qa_format_ok(std::string_view text);

struct Manifest {
  std::uint64_t total_docs = 0;
  std::int64_t total_tokens = 0;
  std::map<std::string, std::uint64_t> counts_by_kind;
  std::map<std::string, std::int64_t> tokens_by_kind;

  std::string to_json() const;
  bool operator==(const Manifest&) const = default;
};

/// JSONL-backed append-only store of synthetic documents. synth_ids are
/// unique; the manifest sidecar (<path>.manifest.json) is verified against
/// recomputed totals when the store is opened.
class CorpusStore {
 public:
  static CorpusStore create(const std::filesystem::path& jsonl_path);
  static CorpusStore open(const std::filesystem::path& jsonl_path);
  static std::filesystem::path manifest_path_for(const std::filesystem::path& jsonl_path);

  void append(const SyntheticDocument& doc);
  bool contains(const std::string& synth_id) const;
  std::span<const SyntheticDocument> docs() const { return docs_; }
  const std::filesystem::path& path() const { return path_; }
  Manifest manifest() const;
  void write_manifest() const;

 private:
  CorpusStore() = default;
  std::filesystem::path path_;
  std::vector<SyntheticDocument> docs_;
  std::unordered_set<std::string> ids_;
  std::ofstream out_;
};

enum class PipelineMode { entigraph, rephrase, qa_sft };

struct PipelineOptions {
  GenerationOptions generation;
  int max_retries = 3;
  /// Triplets per document; unset means the default 2 * C(n,2).
  std::optional<std::uint64_t> triplet_budget;
  std::uint64_t samples = 1;  // rephrase/qa samples per document (and style)
  int concurrency = 4;
  std::uint64_t seed = 0;
};

struct GenerationReport {
  std::size_t generated = 0;
  std::size_t skipped = 0;  // task ids already present in the store
  std::vector<std::string> warnings;
};

/// Runs one generation mode over the sources with bounded concurrency.
/// Results are appended in ascending synth_id order, so the stored corpus
/// is independent of scheduling. Entity sets must cover every source in
/// entigraph mode.
GenerationReport generate_corpus(std::span<const SourceDocument> sources,
                                 std::span<const EntitySet> entity_sets,
                                 CorpusStore& store, providers::ChatClient& chat,
                                 PipelineMode mode, const PipelineOptions& options);

/// Uniform shuffle under seed, then the longest prefix whose token sum
/// stays <= target_tokens. Throws when the target exceeds the total.
std::vector<SyntheticDocument> subsample_corpus(
    std::span<const SyntheticDocument> docs, std::int64_t target_tokens,
    std::uint64_t seed);

struct StatsRow {
  std::string doc_id;
  std::int64_t source_tokens = 0;
  std::int64_t entity_count = 0;
  std::uint64_t synthetic_docs = 0;
  std::int64_t synthetic_tokens = 0;
};

struct StatsReport {
  std::vector<StatsRow> rows;  // ordered by doc_id

  /// "doc_id,source_tokens,entity_count,synthetic_docs,synthetic_tokens"
  std::string per_doc_csv() const;
  /// "metric,bucket_lo,bucket_hi,count" with `buckets` equal-width buckets
  /// per metric over [0, max].
  std::string histogram_csv(std::uint32_t buckets = 10) const;
};

StatsReport corpus_stats(std::span<const SourceDocument> sources,
                         std::span<const EntitySet> entity_sets,
                         std::span<const SyntheticDocument> synthetic);

}  // namespace entikit::synth
