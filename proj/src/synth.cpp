#include "entikit/synth.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <mutex>
#include <set>

#include "entikit/prompts.hpp"
#include "json.hpp"

namespace entikit::synth {

using nlohmann::json;
using ojson = nlohmann::ordered_json;

namespace {

std::uint64_t choose2(std::uint64_t n) { return n < 2 ? 0 : n * (n - 1) / 2; }
std::uint64_t choose3(std::uint64_t n) {
  return n < 3 ? 0 : n * (n - 1) / 2 * (n - 2) / 3;
}

/// Lexicographic unranking of a 3-combination of [0, n).
std::array<std::uint32_t, 3> unrank_triplet(std::uint64_t rank, std::uint32_t n) {
  std::uint32_t i = 0;
  while (rank >= choose2(n - 1 - i)) {
    rank -= choose2(n - 1 - i);
    ++i;
  }
  std::uint32_t j = i + 1;
  while (rank >= n - 1 - j) {
    rank -= n - 1 - j;
    ++j;
  }
  auto k = static_cast<std::uint32_t>(j + 1 + rank);
  return {i, j, k};
}

ojson doc_to_json(const SyntheticDocument& d) {
  ojson j;
  j["synth_id"] = d.synth_id;
  j["doc_id"] = d.doc_id;
  j["kind"] = std::string(to_string(d.kind));
  j["entity_subset"] = d.entity_subset;
  j["text"] = d.text;
  j["token_count"] = d.token_count;
  j["token_count_estimated"] = d.token_count_estimated;
  j["model_id"] = d.model_id;
  j["temperature"] = d.temperature;
  j["created_at"] = d.created_at;
  return j;
}

/// Pulls the JSON object out of a chat completion, tolerating code fences
/// and prose around the braces.
std::optional<json> parse_json_payload(std::string_view text) {
  auto body = trim(text);
  if (body.rfind("```", 0) == 0) {
    auto first_newline = body.find('\n');
    if (first_newline != std::string_view::npos) body = body.substr(first_newline + 1);
    auto last_fence = body.rfind("```");
    if (last_fence != std::string_view::npos) body = body.substr(0, last_fence);
    body = trim(body);
  }
  std::size_t open = body.find_first_of("[{");
  if (open == std::string_view::npos) return std::nullopt;
  char close = body[open] == '{' ? '}' : ']';
  std::size_t end = body.rfind(close);
  if (end == std::string_view::npos || end < open) return std::nullopt;
  json parsed = json::parse(body.substr(open, end - open + 1), nullptr, false);
  if (parsed.is_discarded()) return std::nullopt;
  return parsed;
}

std::vector<std::string> dedupe_entities(const std::vector<std::string>& raw) {
  std::vector<std::string> out;
  std::unordered_set<std::string> seen;
  for (const auto& e : raw) {
    auto cleaned = std::string(trim(e));
    if (cleaned.empty()) continue;
    if (seen.insert(to_lower(cleaned)).second) out.push_back(cleaned);
  }
  return out;
}

std::int64_t completion_tokens(const providers::ChatResponse& response) {
  return response.usage.completion_tokens;
}

}  // namespace

void SourceDocument::validate() const {
  if (doc_id.empty()) throw ValidationError("source document: doc_id required");
  if (trim(text).empty())
    throw ValidationError("source document " + doc_id + ": text must be non-empty");
  if (token_count <= 0)
    throw ValidationError("source document " + doc_id + ": token_count must be > 0");
}

std::string_view to_string(SynthKind kind) {
  switch (kind) {
    case SynthKind::entigraph_pair: return "entigraph_pair";
    case SynthKind::entigraph_triplet: return "entigraph_triplet";
    case SynthKind::rephrase_easy: return "rephrase_easy";
    case SynthKind::rephrase_medium: return "rephrase_medium";
    case SynthKind::rephrase_hard: return "rephrase_hard";
    case SynthKind::qa_sft: return "qa_sft";
  }
  throw Error("unknown synth kind");
}

SynthKind synth_kind_from_string(std::string_view name) {
  for (auto kind : {SynthKind::entigraph_pair, SynthKind::entigraph_triplet,
                    SynthKind::rephrase_easy, SynthKind::rephrase_medium,
                    SynthKind::rephrase_hard, SynthKind::qa_sft}) {
    if (to_string(kind) == name) return kind;
  }
  throw ValidationError("unknown synthetic document kind: " + std::string(name));
}

std::string SyntheticDocument::to_jsonl() const { return doc_to_json(*this).dump(); }

SyntheticDocument SyntheticDocument::from_jsonl(std::string_view line) {
  json j = json::parse(line, nullptr, false);
  if (j.is_discarded() || !j.is_object())
    throw ParseError("synthetic document: invalid JSONL line");
  try {
    SyntheticDocument d;
    d.synth_id = j.at("synth_id").get<std::string>();
    d.doc_id = j.at("doc_id").get<std::string>();
    d.kind = synth_kind_from_string(j.at("kind").get<std::string>());
    d.entity_subset = j.at("entity_subset").get<std::vector<std::string>>();
    d.text = j.at("text").get<std::string>();
    d.token_count = j.at("token_count").get<std::int64_t>();
    d.token_count_estimated = j.at("token_count_estimated").get<bool>();
    d.model_id = j.at("model_id").get<std::string>();
    d.temperature = j.at("temperature").get<double>();
    d.created_at = j.at("created_at").get<std::string>();
    return d;
  } catch (const json::exception& e) {
    throw ParseError(std::string("synthetic document: missing field: ") + e.what());
  }
}

namespace {

std::vector<std::string> read_lines(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot open " + path.string());
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    if (!trim(line).empty()) lines.push_back(line);
  }
  return lines;
}

}  // namespace

std::vector<SourceDocument> read_source_corpus(const std::filesystem::path& path) {
  std::vector<SourceDocument> docs;
  for (const auto& line : read_lines(path)) {
    json j = json::parse(line, nullptr, false);
    if (j.is_discarded()) throw ParseError("source corpus: invalid JSONL in " + path.string());
    try {
      SourceDocument d;
      d.doc_id = j.at("doc_id").get<std::string>();
      d.title = j.at("title").get<std::string>();
      d.author = j.at("author").get<std::string>();
      d.year = j.at("year").get<int>();
      d.text = j.at("text").get<std::string>();
      d.token_count = j.at("token_count").get<std::int64_t>();
      d.validate();
      docs.push_back(std::move(d));
    } catch (const json::exception& e) {
      throw ParseError(std::string("source corpus: missing field: ") + e.what());
    }
  }
  return docs;
}

void write_source_corpus(std::span<const SourceDocument> docs,
                         const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write " + path.string());
  for (const auto& d : docs) {
    ojson j;
    j["doc_id"] = d.doc_id;
    j["title"] = d.title;
    j["author"] = d.author;
    j["year"] = d.year;
    j["text"] = d.text;
    j["token_count"] = d.token_count;
    out << j.dump() << '\n';
  }
}

std::vector<EntitySet> read_entity_sets(const std::filesystem::path& path) {
  std::vector<EntitySet> sets;
  for (const auto& line : read_lines(path)) {
    json j = json::parse(line, nullptr, false);
    if (j.is_discarded()) throw ParseError("entity sets: invalid JSONL in " + path.string());
    EntitySet s;
    s.doc_id = j.at("doc_id").get<std::string>();
    s.summary = j.at("summary").get<std::string>();
    s.entities = j.at("entities").get<std::vector<std::string>>();
    sets.push_back(std::move(s));
  }
  return sets;
}

void write_entity_sets(std::span<const EntitySet> sets,
                       const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write " + path.string());
  for (const auto& s : sets) {
    ojson j;
    j["doc_id"] = s.doc_id;
    j["summary"] = s.summary;
    j["entities"] = s.entities;
    out << j.dump() << '\n';
  }
}

std::string synth_task_id(std::string_view doc_id, SynthKind kind,
                          std::span<const std::string> entity_subset,
                          std::uint64_t sample_index) {
  std::vector<std::string> sorted(entity_subset.begin(), entity_subset.end());
  std::sort(sorted.begin(), sorted.end());
  std::uint64_t h = fnv1a64(doc_id);
  h = fnv1a64(to_string(kind), h);
  for (const auto& e : sorted) {
    h = fnv1a64("\x1f", h);
    h = fnv1a64(e, h);
  }
  h ^= sample_index * 0x9E3779B97F4A7C15ULL;
  return hex64(h);
}

ExtractResult extract_entities(const SourceDocument& doc,
                               providers::ChatClient& chat, int max_retries,
                               double temperature) {
  doc.validate();
  std::string base_user = prompts::entity_extraction_user(doc.text);
  std::string last_raw;
  for (int attempt = 0; attempt <= max_retries; ++attempt) {
    providers::ChatRequest request;
    request.system = std::string(prompts::kEntityExtractionSystem);
    request.user = attempt == 0 ? base_user
                                : base_user + std::string(prompts::kJsonRetrySuffix);
    request.temperature = temperature;
    auto response = chat.chat(request);
    last_raw = response.text;
    auto parsed = parse_json_payload(response.text);
    if (!parsed || !parsed->is_object() || !parsed->contains("summary") ||
        !parsed->contains("entities") || !(*parsed)["entities"].is_array())
      continue;
    std::vector<std::string> raw;
    bool clean = true;
    for (const auto& item : (*parsed)["entities"]) {
      if (!item.is_string()) {
        clean = false;
        break;
      }
      raw.push_back(item.get<std::string>());
    }
    if (!clean) continue;
    auto entities = dedupe_entities(raw);
    if (entities.empty()) continue;  // non-empty on success
    ExtractResult result;
    result.set.doc_id = doc.doc_id;
    result.set.summary = (*parsed)["summary"].is_string()
                             ? (*parsed)["summary"].get<std::string>()
                             : std::string();
    result.set.entities = std::move(entities);
    result.retry_count = attempt;
    return result;
  }
  throw ParseError("entity extraction failed for " + doc.doc_id +
                   " after retries; last response: " + last_raw.substr(0, 500));
}

std::vector<RelationTask> enumerate_relation_tasks(const EntitySet& entities,
                                                   std::uint64_t triplet_budget,
                                                   std::uint64_t seed) {
  const auto n = static_cast<std::uint32_t>(entities.entities.size());
  std::vector<RelationTask> tasks;
  if (n < 2) return tasks;
  for (std::uint32_t i = 0; i + 1 < n; ++i)
    for (std::uint32_t j = i + 1; j < n; ++j)
      tasks.push_back({SynthKind::entigraph_pair, {i, j}});

  std::uint64_t total = choose3(n);
  std::uint64_t want = std::min(triplet_budget, total);
  if (want == 0) return tasks;
  // Floyd's uniform sampling without replacement over combination ranks.
  Rng rng(seed);
  std::set<std::uint64_t> ranks;
  for (std::uint64_t t = total - want; t < total; ++t) {
    std::uint64_t r = rng.below(t + 1);
    if (!ranks.insert(r).second) ranks.insert(t);
  }
  for (std::uint64_t rank : ranks) {
    auto [i, j, k] = unrank_triplet(rank, n);
    tasks.push_back({SynthKind::entigraph_triplet, {i, j, k}});
  }
  return tasks;
}

SyntheticDocument generate_relation(const SourceDocument& doc,
                                    const EntitySet& entities,
                                    std::span<const std::string> subset,
                                    providers::ChatClient& chat,
                                    const GenerationOptions& options) {
  doc.validate();
  if (subset.size() != 2 && subset.size() != 3)
    throw ValidationError("generate_relation: need exactly 2 or 3 entities");
  std::set<std::string> distinct(subset.begin(), subset.end());
  if (distinct.size() != subset.size())
    throw ValidationError("generate_relation: entities must be distinct");
  for (const auto& e : subset) {
    if (std::find(entities.entities.begin(), entities.entities.end(), e) ==
        entities.entities.end())
      throw ValidationError("generate_relation: entity '" + e +
                            "' not in the extracted set for " + doc.doc_id);
  }
  bool pair = subset.size() == 2;
  providers::ChatRequest request;
  request.system = std::string(pair ? prompts::kRelationPairSystem
                                    : prompts::kRelationTripletSystem);
  request.user = prompts::relation_user(doc.text, {subset.data(), subset.size()});
  request.temperature = options.temperature;
  auto response = chat.chat(request);

  SyntheticDocument out;
  out.kind = pair ? SynthKind::entigraph_pair : SynthKind::entigraph_triplet;
  out.synth_id = synth_task_id(doc.doc_id, out.kind, subset);
  out.doc_id = doc.doc_id;
  out.entity_subset.assign(subset.begin(), subset.end());
  out.text = response.text;
  out.token_count = completion_tokens(response);
  out.token_count_estimated = response.usage.estimated;
  out.model_id = options.model_id;
  out.temperature = options.temperature;
  out.created_at = options.now();
  return out;
}

RephraseStyle rephrase_style_from_string(std::string_view name) {
  if (name == "easy") return RephraseStyle::easy;
  if (name == "medium") return RephraseStyle::medium;
  if (name == "hard") return RephraseStyle::hard;
  throw ValidationError("unknown rephrase style: " + std::string(name));
}

SyntheticDocument generate_rephrase(const SourceDocument& doc, RephraseStyle style,
                                    std::uint64_t sample_index,
                                    providers::ChatClient& chat,
                                    const GenerationOptions& options) {
  doc.validate();
  SynthKind kind;
  std::string_view system;
  switch (style) {
    case RephraseStyle::easy:
      kind = SynthKind::rephrase_easy;
      system = prompts::kRephraseEasySystem;
      break;
    case RephraseStyle::medium:
      kind = SynthKind::rephrase_medium;
      system = prompts::kRephraseMediumSystem;
      break;
    case RephraseStyle::hard:
      kind = SynthKind::rephrase_hard;
      system = prompts::kRephraseHardSystem;
      break;
    default:
      throw ValidationError("invalid rephrase style");
  }
  providers::ChatRequest request;
  request.system = std::string(system);
  request.user = prompts::article_user(doc.title, doc.year, doc.text);
  request.temperature = 1.0;  // rephrase generation is pinned at 1.0
  request.seed = sample_index;
  auto response = chat.chat(request);

  SyntheticDocument out;
  out.kind = kind;
  out.synth_id = synth_task_id(doc.doc_id, kind, {}, sample_index);
  out.doc_id = doc.doc_id;
  out.text = response.text;
  out.token_count = completion_tokens(response);
  out.token_count_estimated = response.usage.estimated;
  out.model_id = options.model_id;
  out.temperature = 1.0;
  out.created_at = options.now();
  return out;
}

SyntheticDocument generate_qa_sft(const SourceDocument& doc,
                                  std::uint64_t sample_index,
                                  providers::ChatClient& chat,
                                  const GenerationOptions& options) {
  doc.validate();
  providers::ChatRequest request;
  request.system = std::string(prompts::kQaSftSystem);
  request.user = prompts::article_user(doc.title, doc.year, doc.text);
  request.temperature = 1.0;
  request.seed = sample_index;
  auto response = chat.chat(request);

  SyntheticDocument out;
  out.kind = SynthKind::qa_sft;
  out.synth_id = synth_task_id(doc.doc_id, SynthKind::qa_sft, {}, sample_index);
  out.doc_id = doc.doc_id;
  out.text = response.text;
  out.token_count = completion_tokens(response);
  out.token_count_estimated = response.usage.estimated;
  out.model_id = options.model_id;
  out.temperature = 1.0;
  out.created_at = options.now();
  return out;
}

bool qa_format_ok(std::string_view text) {
  return text.find("Question:") != std::string_view::npos;
}

std::string Manifest::to_json() const {
  ojson j;
  j["total_docs"] = total_docs;
  j["total_tokens"] = total_tokens;
  j["counts_by_kind"] = counts_by_kind;
  j["tokens_by_kind"] = tokens_by_kind;
  return j.dump(2);
}

std::filesystem::path CorpusStore::manifest_path_for(
    const std::filesystem::path& jsonl_path) {
  auto p = jsonl_path;
  p += ".manifest.json";
  return p;
}

CorpusStore CorpusStore::create(const std::filesystem::path& jsonl_path) {
  CorpusStore store;
  store.path_ = jsonl_path;
  store.out_.open(jsonl_path, std::ios::binary | std::ios::trunc);
  if (!store.out_) throw Error("cannot create corpus store " + jsonl_path.string());
  return store;
}

CorpusStore CorpusStore::open(const std::filesystem::path& jsonl_path) {
  CorpusStore store;
  store.path_ = jsonl_path;
  for (const auto& line : read_lines(jsonl_path)) {
    auto doc = SyntheticDocument::from_jsonl(line);
    if (!store.ids_.insert(doc.synth_id).second)
      throw ParseError("corpus store: duplicate synth_id " + doc.synth_id);
    store.docs_.push_back(std::move(doc));
  }
  auto manifest_path = manifest_path_for(jsonl_path);
  if (std::filesystem::exists(manifest_path)) {
    std::ifstream in(manifest_path, std::ios::binary);
    json j = json::parse(in, nullptr, false);
    if (j.is_discarded()) throw ParseError("corpus store: invalid manifest JSON");
    Manifest stored;
    stored.total_docs = j.at("total_docs").get<std::uint64_t>();
    stored.total_tokens = j.at("total_tokens").get<std::int64_t>();
    stored.counts_by_kind =
        j.at("counts_by_kind").get<std::map<std::string, std::uint64_t>>();
    stored.tokens_by_kind =
        j.at("tokens_by_kind").get<std::map<std::string, std::int64_t>>();
    if (!(stored == store.manifest()))
      throw ParseError("corpus store: manifest totals disagree with the store at " +
                       jsonl_path.string());
  }
  store.out_.open(jsonl_path, std::ios::binary | std::ios::app);
  if (!store.out_) throw Error("cannot reopen corpus store " + jsonl_path.string());
  return store;
}

void CorpusStore::append(const SyntheticDocument& doc) {
  if (doc.synth_id.empty()) throw ValidationError("corpus store: synth_id required");
  if (!ids_.insert(doc.synth_id).second)
    throw ValidationError("corpus store: duplicate synth_id " + doc.synth_id);
  out_ << doc.to_jsonl() << '\n';
  out_.flush();
  if (!out_) throw Error("corpus store: append failed");
  docs_.push_back(doc);
}

bool CorpusStore::contains(const std::string& synth_id) const {
  return ids_.count(synth_id) > 0;
}

Manifest CorpusStore::manifest() const {
  Manifest m;
  m.total_docs = docs_.size();
  for (const auto& d : docs_) {
    m.total_tokens += d.token_count;
    m.counts_by_kind[std::string(to_string(d.kind))] += 1;
    m.tokens_by_kind[std::string(to_string(d.kind))] += d.token_count;
  }
  return m;
}

void CorpusStore::write_manifest() const {
  auto path = manifest_path_for(path_);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write manifest " + path.string());
  out << manifest().to_json() << '\n';
}

GenerationReport generate_corpus(std::span<const SourceDocument> sources,
                                 std::span<const EntitySet> entity_sets,
                                 CorpusStore& store, providers::ChatClient& chat,
                                 PipelineMode mode, const PipelineOptions& options) {
  std::map<std::string, const EntitySet*> entities_by_doc;
  for (const auto& es : entity_sets) entities_by_doc[es.doc_id] = &es;

  struct Pending {
    const SourceDocument* doc = nullptr;
    const EntitySet* entities = nullptr;
    SynthKind kind = SynthKind::entigraph_pair;
    std::vector<std::string> subset;
    std::uint64_t sample_index = 0;
    std::string synth_id;
  };
  GenerationReport report;
  std::vector<Pending> pending;
  std::unordered_set<std::string> queued;

  auto enqueue = [&](Pending p) {
    if (store.contains(p.synth_id) || !queued.insert(p.synth_id).second) {
      ++report.skipped;
      return;
    }
    pending.push_back(std::move(p));
  };

  for (const auto& doc : sources) {
    doc.validate();
    switch (mode) {
      case PipelineMode::entigraph: {
        auto found = entities_by_doc.find(doc.doc_id);
        if (found == entities_by_doc.end())
          throw ValidationError("generate: no entity set for " + doc.doc_id);
        const EntitySet& es = *found->second;
        auto n = static_cast<std::uint64_t>(es.entities.size());
        std::uint64_t budget = options.triplet_budget.value_or(2 * choose2(n));
        // Per-document stream keeps the triplet choice stable under source
        // reordering.
        auto tasks = enumerate_relation_tasks(es, budget,
                                              options.seed ^ fnv1a64(doc.doc_id));
        if (tasks.empty())
          report.warnings.push_back("doc " + doc.doc_id +
                                    ": fewer than 2 entities, nothing to relate");
        for (const auto& task : tasks) {
          Pending p;
          p.doc = &doc;
          p.entities = &es;
          p.kind = task.kind;
          for (auto idx : task.entity_indices) p.subset.push_back(es.entities[idx]);
          p.synth_id = synth_task_id(doc.doc_id, task.kind, p.subset);
          enqueue(std::move(p));
        }
        break;
      }
      case PipelineMode::rephrase: {
        for (auto style : {SynthKind::rephrase_easy, SynthKind::rephrase_medium,
                           SynthKind::rephrase_hard}) {
          for (std::uint64_t s = 0; s < options.samples; ++s) {
            Pending p;
            p.doc = &doc;
            p.kind = style;
            p.sample_index = s;
            p.synth_id = synth_task_id(doc.doc_id, style, {}, s);
            enqueue(std::move(p));
          }
        }
        break;
      }
      case PipelineMode::qa_sft: {
        for (std::uint64_t s = 0; s < options.samples; ++s) {
          Pending p;
          p.doc = &doc;
          p.kind = SynthKind::qa_sft;
          p.sample_index = s;
          p.synth_id = synth_task_id(doc.doc_id, SynthKind::qa_sft, {}, s);
          enqueue(std::move(p));
        }
        break;
      }
    }
  }

  std::vector<SyntheticDocument> results(pending.size());
  parallel_for(pending.size(), static_cast<unsigned>(options.concurrency),
               [&](std::size_t i) {
                 const Pending& p = pending[i];
                 switch (p.kind) {
                   case SynthKind::entigraph_pair:
                   case SynthKind::entigraph_triplet:
                     results[i] = generate_relation(*p.doc, *p.entities, p.subset,
                                                    chat, options.generation);
                     break;
                   case SynthKind::rephrase_easy:
                     results[i] = generate_rephrase(*p.doc, RephraseStyle::easy,
                                                    p.sample_index, chat,
                                                    options.generation);
                     break;
                   case SynthKind::rephrase_medium:
                     results[i] = generate_rephrase(*p.doc, RephraseStyle::medium,
                                                    p.sample_index, chat,
                                                    options.generation);
                     break;
                   case SynthKind::rephrase_hard:
                     results[i] = generate_rephrase(*p.doc, RephraseStyle::hard,
                                                    p.sample_index, chat,
                                                    options.generation);
                     break;
                   case SynthKind::qa_sft:
                     results[i] = generate_qa_sft(*p.doc, p.sample_index, chat,
                                                  options.generation);
                     break;
                 }
               });

  std::sort(results.begin(), results.end(),
            [](const SyntheticDocument& a, const SyntheticDocument& b) {
              return a.synth_id < b.synth_id;
            });
  for (const auto& doc : results) {
    if (doc.kind == SynthKind::qa_sft && !qa_format_ok(doc.text))
      report.warnings.push_back("qa_sft " + doc.synth_id +
                                ": response lacks a Question: tag");
    store.append(doc);
    ++report.generated;
  }
  return report;
}

std::vector<SyntheticDocument> subsample_corpus(
    std::span<const SyntheticDocument> docs, std::int64_t target_tokens,
    std::uint64_t seed) {
  std::int64_t total = 0;
  for (const auto& d : docs) total += d.token_count;
  if (target_tokens > total)
    throw ValidationError("subsample: target " + std::to_string(target_tokens) +
                          " exceeds total " + std::to_string(total));
  std::vector<SyntheticDocument> shuffled(docs.begin(), docs.end());
  Rng rng(seed);
  for (std::size_t i = shuffled.size(); i > 1; --i) {
    std::size_t j = rng.below(i);
    std::swap(shuffled[i - 1], shuffled[j]);
  }
  std::vector<SyntheticDocument> out;
  std::int64_t used = 0;
  for (auto& d : shuffled) {
    if (used + d.token_count > target_tokens) break;
    used += d.token_count;
    out.push_back(std::move(d));
  }
  return out;
}

StatsReport corpus_stats(std::span<const SourceDocument> sources,
                         std::span<const EntitySet> entity_sets,
                         std::span<const SyntheticDocument> synthetic) {
  std::map<std::string, StatsRow> rows;
  for (const auto& s : sources) {
    auto& row = rows[s.doc_id];
    row.doc_id = s.doc_id;
    row.source_tokens = s.token_count;
  }
  for (const auto& es : entity_sets) {
    auto& row = rows[es.doc_id];
    row.doc_id = es.doc_id;
    row.entity_count = static_cast<std::int64_t>(es.entities.size());
  }
  for (const auto& d : synthetic) {
    auto& row = rows[d.doc_id];
    row.doc_id = d.doc_id;
    row.synthetic_docs += 1;
    row.synthetic_tokens += d.token_count;
  }
  StatsReport report;
  for (auto& [id, row] : rows) report.rows.push_back(row);
  return report;
}

std::string StatsReport::per_doc_csv() const {
  std::string out = "doc_id,source_tokens,entity_count,synthetic_docs,synthetic_tokens\n";
  for (const auto& r : rows) {
    out += r.doc_id;
    out += ',';
    out += std::to_string(r.source_tokens);
    out += ',';
    out += std::to_string(r.entity_count);
    out += ',';
    out += std::to_string(r.synthetic_docs);
    out += ',';
    out += std::to_string(r.synthetic_tokens);
    out += '\n';
  }
  return out;
}

std::string StatsReport::histogram_csv(std::uint32_t buckets) const {
  if (buckets == 0) throw ValidationError("histogram: buckets must be >= 1");
  std::string out = "metric,bucket_lo,bucket_hi,count\n";
  auto emit = [&](const std::string& metric,
                  const std::vector<std::int64_t>& values) {
    std::int64_t max_value = 0;
    for (auto v : values) max_value = std::max(max_value, v);
    std::int64_t width = std::max<std::int64_t>(1, (max_value + buckets) / buckets);
    std::vector<std::uint64_t> counts(buckets, 0);
    for (auto v : values) {
      auto idx = static_cast<std::size_t>(
          std::min<std::int64_t>(v / width, buckets - 1));
      ++counts[idx];
    }
    for (std::uint32_t b = 0; b < buckets; ++b) {
      out += metric;
      out += ',';
      out += std::to_string(static_cast<std::int64_t>(b) * width);
      out += ',';
      out += std::to_string(static_cast<std::int64_t>(b + 1) * width - 1);
      out += ',';
      out += std::to_string(counts[b]);
      out += '\n';
    }
  };
  std::vector<std::int64_t> source, entity, synth;
  for (const auto& r : rows) {
    source.push_back(r.source_tokens);
    entity.push_back(r.entity_count);
    synth.push_back(r.synthetic_tokens);
  }
  emit("source_tokens", source);
  emit("entity_count", entity);
  emit("synthetic_tokens", synth);
  return out;
}

}  // namespace entikit::synth
