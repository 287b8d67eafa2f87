#include "entikit/retrieval.hpp"

#include <algorithm>
#include <bit>
#include <cctype>
#include <cstdio>
#include <unordered_set>
#include <fstream>

#include "entikit/prompts.hpp"
#include "json.hpp"

namespace entikit::rag {

using nlohmann::json;
using ojson = nlohmann::ordered_json;

namespace {

enum Level : int { kBlankLine = 0, kNewline, kSentence, kSpace, kChar };

bool is_line_space(char c) { return c == ' ' || c == '\t'; }

/// Piece end offsets inside [begin, end) for one separator level; the
/// separator stays attached to the left piece so pieces concatenate back to
/// the original text.
std::vector<std::size_t> split_points(std::string_view text, std::size_t begin,
                                      std::size_t end, int level) {
  std::vector<std::size_t> cuts;
  switch (level) {
    case kBlankLine: {
      std::size_t i = begin;
      while (i < end) {
        if (text[i] == '\n') {
          std::size_t run = i;
          while (run < end && text[run] == '\n') ++run;
          if (run - i >= 2 && run < end) cuts.push_back(run);
          i = run;
        } else {
          ++i;
        }
      }
      break;
    }
    case kNewline: {
      for (std::size_t i = begin; i + 1 < end; ++i)
        if (text[i] == '\n') cuts.push_back(i + 1);
      break;
    }
    case kSentence: {
      std::size_t i = begin;
      while (i < end) {
        char c = text[i];
        if (c == '.' || c == '?' || c == '!') {
          std::size_t j = i;
          while (j < end && (text[j] == '.' || text[j] == '?' || text[j] == '!')) ++j;
          std::size_t ws = j;
          while (ws < end && std::isspace(static_cast<unsigned char>(text[ws]))) ++ws;
          if (ws > j && ws < end) cuts.push_back(ws);
          i = ws > j ? ws : j;
        } else {
          ++i;
        }
      }
      break;
    }
    case kSpace: {
      std::size_t i = begin;
      while (i < end) {
        if (is_line_space(text[i])) {
          std::size_t run = i;
          while (run < end && is_line_space(text[run])) ++run;
          if (run < end) cuts.push_back(run);
          i = run;
        } else {
          ++i;
        }
      }
      break;
    }
    default:
      break;
  }
  return cuts;
}

void chunk_range(std::string_view text, std::size_t begin, std::size_t end,
                 std::size_t chunk_size, int level,
                 std::vector<std::pair<std::size_t, std::size_t>>& out) {
  if (end <= begin) return;
  if (end - begin <= chunk_size) {
    out.emplace_back(begin, end);
    return;
  }
  if (level >= kChar) {
    for (std::size_t p = begin; p < end; p += chunk_size)
      out.emplace_back(p, std::min(end, p + chunk_size));
    return;
  }
  auto cuts = split_points(text, begin, end, level);
  if (cuts.empty()) {
    chunk_range(text, begin, end, chunk_size, level + 1, out);
    return;
  }
  std::vector<std::pair<std::size_t, std::size_t>> pieces;
  std::size_t prev = begin;
  for (std::size_t c : cuts) {
    pieces.emplace_back(prev, c);
    prev = c;
  }
  if (prev < end) pieces.emplace_back(prev, end);

  std::size_t cur_begin = begin, cur_end = begin;
  for (auto [b, e] : pieces) {
    if (e - b > chunk_size) {
      if (cur_end > cur_begin) out.emplace_back(cur_begin, cur_end);
      chunk_range(text, b, e, chunk_size, level + 1, out);
      cur_begin = cur_end = e;
    } else if (e - cur_begin <= chunk_size) {
      cur_end = e;
    } else {
      if (cur_end > cur_begin) out.emplace_back(cur_begin, cur_end);
      cur_begin = b;
      cur_end = e;
    }
  }
  if (cur_end > cur_begin) out.emplace_back(cur_begin, cur_end);
}

}  // namespace

std::vector<Chunk> chunk_document(const synth::SourceDocument& doc,
                                  std::size_t chunk_size) {
  if (chunk_size < 32) throw ValidationError("chunking: chunk_size must be >= 32");
  doc.validate();
  std::vector<std::pair<std::size_t, std::size_t>> spans;
  chunk_range(doc.text, 0, doc.text.size(), chunk_size, kBlankLine, spans);

  std::string header =
      doc.title + " | " + doc.author + " | " + std::to_string(doc.year);
  std::vector<Chunk> chunks;
  chunks.reserve(spans.size());
  for (std::size_t i = 0; i < spans.size(); ++i) {
    char idx[8];
    std::snprintf(idx, sizeof(idx), "%05zu", i);
    Chunk c;
    c.chunk_id = doc.doc_id + "#" + idx;
    c.doc_id = doc.doc_id;
    c.header = header;
    c.body = doc.text.substr(spans[i].first, spans[i].second - spans[i].first);
    c.span_begin = spans[i].first;
    c.span_end = spans[i].second;
    chunks.push_back(std::move(c));
  }
  return chunks;
}

VectorIndex::VectorIndex(std::size_t dim, std::vector<std::string> chunk_ids,
                         std::vector<float> data)
    : dim_(dim), chunk_ids_(std::move(chunk_ids)), data_(std::move(data)) {
  if (data_.size() != dim_ * chunk_ids_.size())
    throw ValidationError("vector index: data size does not match dim * count");
}

void VectorIndex::save(const std::filesystem::path& path) const {
  static_assert(std::endian::native == std::endian::little,
                "vector file format is little-endian");
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write vector index " + path.string());
  ojson header{{"dim", dim_}, {"count", chunk_ids_.size()}};
  out << header.dump() << '\n';
  out.write(reinterpret_cast<const char*>(data_.data()),
            static_cast<std::streamsize>(data_.size() * sizeof(float)));
  if (!out) throw Error("vector index write failed");
}

VectorIndex VectorIndex::load(const std::filesystem::path& path,
                              std::vector<std::string> chunk_ids) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot open vector index " + path.string());
  std::string header_line;
  if (!std::getline(in, header_line))
    throw ParseError("vector index: missing header line");
  json header = json::parse(header_line, nullptr, false);
  if (header.is_discarded())
    throw ParseError("vector index: header is not valid JSON");
  auto dim = header.at("dim").get<std::size_t>();
  auto count = header.at("count").get<std::size_t>();
  std::vector<float> data(dim * count);
  in.read(reinterpret_cast<char*>(data.data()),
          static_cast<std::streamsize>(data.size() * sizeof(float)));
  if (static_cast<std::size_t>(in.gcount()) != data.size() * sizeof(float))
    throw ParseError("vector index: truncated vector data");
  if (chunk_ids.size() != count)
    throw ValidationError("vector index: chunk record count does not match header");
  return VectorIndex(dim, std::move(chunk_ids), std::move(data));
}

VectorIndex build_index(std::span<const Chunk> chunks,
                        providers::EmbedClient& embed, std::size_t batch_size) {
  if (batch_size == 0) throw ValidationError("build_index: batch_size must be >= 1");
  std::unordered_set<std::string> ids;
  for (const auto& c : chunks)
    if (!ids.insert(c.chunk_id).second)
      throw ValidationError("build_index: duplicate chunk_id " + c.chunk_id);

  std::size_t dim = 0;
  std::vector<float> data;
  std::vector<std::string> chunk_ids;
  chunk_ids.reserve(chunks.size());
  for (std::size_t at = 0; at < chunks.size(); at += batch_size) {
    std::size_t n = std::min(batch_size, chunks.size() - at);
    std::vector<std::string> texts;
    texts.reserve(n);
    for (std::size_t i = 0; i < n; ++i) texts.push_back(chunks[at + i].embed_text());
    auto vectors = embed.embed(texts);
    if (vectors.size() != n)
      throw ProviderError("build_index: embedding batch size mismatch");
    for (std::size_t i = 0; i < n; ++i) {
      if (dim == 0) {
        dim = vectors[i].dim();
        if (dim == 0) throw ProviderError("build_index: zero-dimensional embedding");
      }
      if (vectors[i].dim() != dim)
        throw ProviderError("build_index: inconsistent embedding dimensions");
      data.insert(data.end(), vectors[i].values.begin(), vectors[i].values.end());
      chunk_ids.push_back(chunks[at + i].chunk_id);
    }
  }
  return VectorIndex(dim, std::move(chunk_ids), std::move(data));
}

void save_chunks(std::span<const Chunk> chunks, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write chunks " + path.string());
  for (const auto& c : chunks) {
    ojson j;
    j["chunk_id"] = c.chunk_id;
    j["doc_id"] = c.doc_id;
    j["header"] = c.header;
    j["body"] = c.body;
    j["span_begin"] = c.span_begin;
    j["span_end"] = c.span_end;
    out << j.dump() << '\n';
  }
}

std::vector<Chunk> load_chunks(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot open chunks " + path.string());
  std::vector<Chunk> chunks;
  std::string line;
  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    json j = json::parse(line, nullptr, false);
    if (j.is_discarded()) throw ParseError("chunks: invalid JSONL");
    Chunk c;
    c.chunk_id = j.at("chunk_id").get<std::string>();
    c.doc_id = j.at("doc_id").get<std::string>();
    c.header = j.at("header").get<std::string>();
    c.body = j.at("body").get<std::string>();
    c.span_begin = j.at("span_begin").get<std::size_t>();
    c.span_end = j.at("span_end").get<std::size_t>();
    chunks.push_back(std::move(c));
  }
  return chunks;
}

std::vector<RetrievedChunk> retrieve(const VectorIndex& index,
                                     const std::string& query,
                                     providers::EmbedClient& embed, std::size_t k) {
  if (k == 0) throw ValidationError("retrieve: K must be >= 1");
  if (index.size() == 0) return {};
  std::vector<std::string> one{query};
  auto vectors = embed.embed(one);
  if (vectors.size() != 1) throw ProviderError("retrieve: bad embedding batch");
  if (vectors[0].dim() != index.dim())
    throw ProviderError("retrieve: query dimension does not match the index");
  const auto& q = vectors[0].values;

  std::vector<RetrievedChunk> hits;
  hits.reserve(index.size());
  for (std::size_t i = 0; i < index.size(); ++i) {
    auto row = index.vector(i);
    double d = 0.0;
    for (std::size_t j = 0; j < row.size(); ++j) {
      double diff = static_cast<double>(row[j]) - static_cast<double>(q[j]);
      d += diff * diff;
    }
    hits.push_back({i, d});
  }
  std::sort(hits.begin(), hits.end(),
            [&](const RetrievedChunk& a, const RetrievedChunk& b) {
              if (a.distance != b.distance) return a.distance < b.distance;
              return index.chunk_id(a.index) < index.chunk_id(b.index);
            });
  if (hits.size() > k) hits.resize(k);
  return hits;
}

std::vector<std::size_t> rerank_chunks(const std::string& query,
                                       std::span<const Chunk> retrieved,
                                       providers::RerankClient& rerank,
                                       std::size_t k) {
  if (k == 0) throw ValidationError("rerank: k must be >= 1");
  if (retrieved.empty()) return {};
  std::vector<std::string> candidates;
  candidates.reserve(retrieved.size());
  for (const auto& c : retrieved) candidates.push_back(c.embed_text());
  auto ranked = rerank.rerank(query, candidates);
  if (ranked.size() != candidates.size())
    throw ProviderError("rerank: provider returned a different candidate count");
  std::vector<bool> seen(candidates.size(), false);
  std::vector<std::size_t> out;
  for (const auto& rc : ranked) {
    if (rc.index >= candidates.size() || seen[rc.index])
      throw ProviderError("rerank: invalid or duplicate candidate index");
    seen[rc.index] = true;
    if (out.size() < k) out.push_back(rc.index);
  }
  return out;
}

ContextOrder context_order_from_string(std::string_view name) {
  if (name == "best_first") return ContextOrder::best_first;
  if (name == "best_last") return ContextOrder::best_last;
  throw ValidationError("unknown context order: " + std::string(name));
}

void RagConfig::validate() const {
  if (chunk_size < 32) throw ValidationError("rag: chunk_size must be >= 32");
  if (rerank_k < 1 || rerank_k > retrieve_k)
    throw ValidationError("rag: need 1 <= rerank_k <= retrieve_k");
  if (!(eval_temperature >= 0)) throw ValidationError("rag: temperature must be >= 0");
}

std::string assemble_rag_prompt(const McQuestionView& question,
                                std::span<const Chunk> chunks, ContextOrder order) {
  std::string out{prompts::kQaFiveShot};
  if (!chunks.empty()) {
    out += "### Context\n";
    std::vector<const Chunk*> ordered;
    ordered.reserve(chunks.size());
    for (const auto& c : chunks) ordered.push_back(&c);
    if (order == ContextOrder::best_last)
      std::reverse(ordered.begin(), ordered.end());
    for (std::size_t i = 0; i < ordered.size(); ++i) {
      out += std::to_string(i + 1);
      out += ". ";
      out += ordered[i]->header;
      out += '\n';
      out += ordered[i]->body;
      out += "\n\n";
    }
  }
  out += "### Question\n";
  out += question.stem;
  out += " There is only one correct choice.\n### Choices\n";
  const char* labels = "ABCD";
  for (std::size_t i = 0; i < question.choices.size(); ++i) {
    out += labels[i];
    out += ". ";
    out += question.choices[i];
    out += '\n';
  }
  out += "### Thought Process and Answer\nThought process:";
  return out;
}

double recall_at_k(std::span<const std::vector<std::string>> ranked_doc_ids,
                   std::span<const std::string> gold_doc_ids, std::size_t k) {
  if (ranked_doc_ids.size() != gold_doc_ids.size())
    throw ValidationError("recall: ranked lists and gold labels differ in length");
  if (ranked_doc_ids.empty()) throw ValidationError("recall: no questions");
  if (k == 0) throw ValidationError("recall: k must be >= 1");
  std::size_t hits = 0;
  for (std::size_t i = 0; i < ranked_doc_ids.size(); ++i) {
    const auto& ranked = ranked_doc_ids[i];
    std::size_t limit = std::min(k, ranked.size());
    for (std::size_t j = 0; j < limit; ++j) {
      if (ranked[j] == gold_doc_ids[i]) {
        ++hits;
        break;
      }
    }
  }
  return static_cast<double>(hits) / static_cast<double>(ranked_doc_ids.size());
}

}  // namespace entikit::rag
