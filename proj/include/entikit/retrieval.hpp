#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "entikit/common.hpp"
#include "entikit/providers.hpp"
#include "entikit/synth.hpp"

namespace entikit::rag {

/// One non-overlapping piece of a source document. Bodies concatenate back
/// to the source text exactly; the metadata header is prepended only to the
/// embedded/displayed form.
struct Chunk {
  std::string chunk_id;  // "<doc_id>#<index>"
  std::string doc_id;
  std::string header;  // "title | author | year"
  std::string body;
  std::size_t span_begin = 0;
  std::size_t span_end = 0;  // half-open byte span in the source text

  std::string embed_text() const { return header + "\n" + body; }
};

/// Recursive splitting with the separator cascade: blank line, newline,
/// sentence end, space, character. chunk_size is in characters of the body.
std::vector<Chunk> chunk_document(const synth::SourceDocument& doc,
                                  std::size_t chunk_size);

/// Immutable exact-search index: chunk ids plus row-major float vectors.
class VectorIndex {
 public:
  VectorIndex() = default;
  VectorIndex(std::size_t dim, std::vector<std::string> chunk_ids,
              std::vector<float> data);

  std::size_t dim() const { return dim_; }
  std::size_t size() const { return chunk_ids_.size(); }
  const std::string& chunk_id(std::size_t i) const { return chunk_ids_[i]; }
  std::span<const float> vector(std::size_t i) const {
    return {data_.data() + i * dim_, dim_};
  }

  /// Binary layout: one JSON header line {"dim":D,"count":N}, then
  /// N * D little-endian 32-bit floats. Row i belongs to chunk_ids[i],
  /// which the paired chunk-records file supplies on load.
  void save(const std::filesystem::path& path) const;
  static VectorIndex load(const std::filesystem::path& path,
                          std::vector<std::string> chunk_ids);

 private:
  std::size_t dim_ = 0;
  std::vector<std::string> chunk_ids_;
  std::vector<float> data_;
};

/// Embeds chunks in batches and builds the index. Duplicate chunk ids and
/// inconsistent embedding dimensions are errors.
VectorIndex build_index(std::span<const Chunk> chunks,
                        providers::EmbedClient& embed,
                        std::size_t batch_size = 64);

void save_chunks(std::span<const Chunk> chunks, const std::filesystem::path& path);
std::vector<Chunk> load_chunks(const std::filesystem::path& path);

struct RetrievedChunk {
  std::size_t index = 0;  // position in the index
  double distance = 0.0;  // squared L2
};

/// Exact brute-force nearest neighbors by L2 distance, ascending; ties break
/// by chunk_id. K larger than the index returns everything.
std::vector<RetrievedChunk> retrieve(const VectorIndex& index,
                                     const std::string& query,
                                     providers::EmbedClient& embed, std::size_t k);

/// Reranks the retrieved chunks (by their embed_text) and keeps the top k.
/// Returns positions into `retrieved`, most relevant first.
std::vector<std::size_t> rerank_chunks(const std::string& query,
                                       std::span<const Chunk> retrieved,
                                       providers::RerankClient& rerank,
                                       std::size_t k);

enum class ContextOrder { best_first, best_last };
ContextOrder context_order_from_string(std::string_view name);

struct RagConfig {
  std::size_t chunk_size = 512;   // characters; tuned over {256, 512, 1024}
  std::size_t retrieve_k = 128;   // K
  std::size_t rerank_k = 8;       // k <= K
  ContextOrder order = ContextOrder::best_first;
  double eval_temperature = 0.3;

  void validate() const;
};

struct McQuestionView {
  std::string stem;  // already contextualized
  std::array<std::string, 4> choices;
};

/// Few-shot preamble, then the context block (best_first: most relevant
/// first; best_last reverses it), then the question and choices, ending with
/// the completion cue. Zero chunks gives the closed-book prompt shape.
std::string assemble_rag_prompt(const McQuestionView& question,
                                std::span<const Chunk> chunks, ContextOrder order);

/// Fraction of questions whose gold doc_id appears among the top-k entries
/// of its ranked doc_id list.
double recall_at_k(std::span<const std::vector<std::string>> ranked_doc_ids,
                   std::span<const std::string> gold_doc_ids, std::size_t k);

}  // namespace entikit::rag
