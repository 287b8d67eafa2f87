#include "entikit/providers.hpp"

#include <algorithm>
#include <cctype>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <semaphore>
#include <set>
#include <sstream>
#include <thread>
#include <unordered_set>

#include "entikit/prompts.hpp"
#include "httplib.h"
#include "json.hpp"

namespace entikit::providers {

using nlohmann::json;

void ProviderConfig::validate() const {
  if (!(timeout_seconds > 0)) throw ValidationError("provider: timeout must be > 0");
  if (max_in_flight < 1) throw ValidationError("provider: max_in_flight must be >= 1");
  if (max_retries < 0) throw ValidationError("provider: max_retries must be >= 0");
  if (!(temperature >= 0)) throw ValidationError("provider: temperature must be >= 0");
  if (!mock) {
    if (base_url.empty()) throw ValidationError("provider: base_url required");
    if (model_id.empty()) throw ValidationError("provider: model_id required");
  }
  if (mock && mock_embedding_dim < 1)
    throw ValidationError("provider: mock_embedding_dim must be >= 1");
}

TokenUsage estimate_usage(std::size_t prompt_bytes, std::size_t completion_bytes) {
  TokenUsage usage;
  usage.prompt_tokens = static_cast<std::int64_t>(prompt_bytes / 4);
  usage.completion_tokens = static_cast<std::int64_t>(completion_bytes / 4);
  usage.estimated = true;
  return usage;
}

void ChatRequest::validate() const {
  if (trim(user).empty()) throw ValidationError("chat: user message must be non-empty");
}

namespace detail {

/// One JSON POST endpoint with bounded concurrency, retry and backoff.
class HttpTransport {
 public:
  explicit HttpTransport(const ProviderConfig& config)
      : config_(config), gate_(config.max_in_flight) {
    config_.validate();
    auto scheme_end = config_.base_url.find("://");
    if (scheme_end == std::string::npos)
      throw ValidationError("provider: base_url must start with http:// or https://");
    auto path_start = config_.base_url.find('/', scheme_end + 3);
    if (path_start == std::string::npos) {
      origin_ = config_.base_url;
    } else {
      origin_ = config_.base_url.substr(0, path_start);
      path_prefix_ = config_.base_url.substr(path_start);
      while (!path_prefix_.empty() && path_prefix_.back() == '/') path_prefix_.pop_back();
    }
  }

  /// POSTs body to path; returns the parsed JSON response. `retries_out`
  /// reports how many transient failures were absorbed.
  json post_json(const std::string& path, const json& body, int* retries_out) {
    gate_.acquire();
    struct Release {
      std::counting_semaphore<>& gate;
      ~Release() { gate.release(); }
    } release{gate_};

    std::string payload = body.dump();
    std::string url_path = path_prefix_ + path;
    int attempts_used = 0;
    std::string last_error;
    for (int attempt = 0; attempt <= config_.max_retries; ++attempt) {
      if (attempt > 0) {
        double backoff = std::min(config_.retry_backoff_seconds *
                                      std::pow(2.0, attempt - 1),
                                  8.0);
        std::this_thread::sleep_for(std::chrono::duration<double>(backoff));
      }
      httplib::Client client(origin_);
      client.set_connection_timeout(std::chrono::duration<double>(config_.timeout_seconds));
      client.set_read_timeout(std::chrono::duration<double>(config_.timeout_seconds));
      client.set_write_timeout(std::chrono::duration<double>(config_.timeout_seconds));
      httplib::Headers headers;
      if (!config_.api_key_env.empty()) {
        if (const char* key = std::getenv(config_.api_key_env.c_str());
            key != nullptr && *key != '\0') {
          headers.emplace("Authorization", std::string("Bearer ") + key);
        }
      }
      auto res = client.Post(url_path, headers, payload, "application/json");
      if (!res) {
        last_error = "connection failure: " + httplib::to_string(res.error());
        ++attempts_used;
        continue;  // transient
      }
      if (res->status == 401 || res->status == 403)
        throw ProviderError("provider: authentication failed (HTTP " +
                            std::to_string(res->status) + ")");
      if (res->status == 408 || res->status == 429 || res->status >= 500) {
        last_error = "HTTP " + std::to_string(res->status);
        ++attempts_used;
        continue;  // transient
      }
      if (res->status < 200 || res->status >= 300)
        throw ProviderError("provider: HTTP " + std::to_string(res->status) + " from " +
                            url_path);
      json parsed = json::parse(res->body, nullptr, false);
      if (parsed.is_discarded())
        throw ParseError("provider: malformed JSON response from " + url_path);
      if (retries_out) *retries_out = attempt;
      return parsed;
    }
    (void)attempts_used;
    throw ProviderError("provider: " + url_path + " failed after " +
                        std::to_string(config_.max_retries + 1) + " attempts (" +
                        last_error + ")");
  }

  const ProviderConfig& config() const { return config_; }

 private:
  ProviderConfig config_;
  std::string origin_;
  std::string path_prefix_;
  std::counting_semaphore<> gate_;
};

}  // namespace detail

HttpChatClient::HttpChatClient(const ProviderConfig& config)
    : transport_(std::make_unique<detail::HttpTransport>(config)),
      model_id_(config.model_id) {}
HttpChatClient::~HttpChatClient() = default;

ChatResponse HttpChatClient::chat(const ChatRequest& request) {
  request.validate();
  json messages = json::array();
  if (!request.system.empty())
    messages.push_back({{"role", "system"}, {"content", request.system}});
  messages.push_back({{"role", "user"}, {"content", request.user}});
  json body{{"model", model_id_},
            {"messages", std::move(messages)},
            {"temperature", request.temperature}};
  if (request.seed) body["seed"] = *request.seed;

  ChatResponse response;
  json parsed = transport_->post_json("/chat/completions", body, &response.retries);
  try {
    response.text = parsed.at("choices").at(0).at("message").at("content").get<std::string>();
  } catch (const json::exception&) {
    throw ParseError("chat: response missing choices[0].message.content");
  }
  if (parsed.contains("usage") && parsed["usage"].is_object()) {
    const auto& usage = parsed["usage"];
    response.usage.prompt_tokens = usage.value("prompt_tokens", std::int64_t{0});
    response.usage.completion_tokens = usage.value("completion_tokens", std::int64_t{0});
    response.usage.estimated = false;
  } else {
    response.usage =
        estimate_usage(request.system.size() + request.user.size(), response.text.size());
  }
  return response;
}

HttpEmbedClient::HttpEmbedClient(const ProviderConfig& config)
    : transport_(std::make_unique<detail::HttpTransport>(config)),
      model_id_(config.model_id) {}
HttpEmbedClient::~HttpEmbedClient() = default;

std::vector<EmbeddingVector> HttpEmbedClient::embed(std::span<const std::string> texts) {
  if (texts.empty()) return {};
  json body{{"model", model_id_}, {"input", json::array()}};
  for (const auto& t : texts) body["input"].push_back(t);
  json parsed = transport_->post_json("/embeddings", body, nullptr);

  std::vector<EmbeddingVector> out(texts.size());
  std::vector<bool> seen(texts.size(), false);
  try {
    for (const auto& item : parsed.at("data")) {
      auto index = item.at("index").get<std::size_t>();
      if (index >= out.size()) throw ParseError("embed: index out of range");
      out[index].values = item.at("embedding").get<std::vector<float>>();
      seen[index] = true;
    }
  } catch (const json::exception&) {
    throw ParseError("embed: response missing data[].embedding");
  }
  for (bool s : seen)
    if (!s) throw ParseError("embed: response missing entries");
  for (const auto& v : out)
    if (v.dim() != out.front().dim())
      throw ProviderError("embed: inconsistent embedding dimensions in response");
  return out;
}

HttpRerankClient::HttpRerankClient(const ProviderConfig& config)
    : transport_(std::make_unique<detail::HttpTransport>(config)),
      model_id_(config.model_id) {}
HttpRerankClient::~HttpRerankClient() = default;

std::vector<RankedCandidate> HttpRerankClient::rerank(
    const std::string& query, std::span<const std::string> candidates) {
  if (candidates.empty()) return {};
  json body{{"model", model_id_},
            {"query", query},
            {"documents", json::array()},
            {"top_n", candidates.size()}};
  for (const auto& c : candidates) body["documents"].push_back(c);
  json parsed = transport_->post_json("/rerank", body, nullptr);

  std::vector<RankedCandidate> ranked;
  try {
    for (const auto& item : parsed.at("results")) {
      RankedCandidate rc;
      rc.index = item.at("index").get<std::size_t>();
      rc.score = item.at("relevance_score").get<double>();
      if (rc.index >= candidates.size())
        throw ParseError("rerank: index out of range");
      ranked.push_back(rc);
    }
  } catch (const json::exception&) {
    throw ParseError("rerank: response missing results[].relevance_score");
  }
  std::stable_sort(ranked.begin(), ranked.end(),
                   [](const RankedCandidate& a, const RankedCandidate& b) {
                     return a.score > b.score;
                   });
  return ranked;
}

namespace {

bool contains(std::string_view haystack, std::string_view needle) {
  return haystack.find(needle) != std::string_view::npos;
}

std::string stamp(std::uint64_t h) { return "[" + hex64(h) + "]"; }

/// First distinct words of >= 4 letters, case-insensitive dedupe, original
/// surface form kept.
std::vector<std::string> mock_entities(std::string_view text, int cap) {
  std::vector<std::string> out;
  std::unordered_set<std::string> seen;
  std::string word;
  auto flush = [&] {
    if (word.size() >= 4 && static_cast<int>(out.size()) < cap) {
      std::string key = to_lower(word);
      if (seen.insert(key).second) out.push_back(word);
    }
    word.clear();
  };
  for (char c : text) {
    if (std::isalpha(static_cast<unsigned char>(c))) {
      word.push_back(c);
    } else {
      flush();
    }
  }
  flush();
  return out;
}

std::vector<std::string> split_sentences(std::string_view text) {
  std::vector<std::string> out;
  std::string cur;
  for (std::size_t i = 0; i < text.size(); ++i) {
    cur.push_back(text[i]);
    char c = text[i];
    bool end = (c == '.' || c == '!' || c == '?') &&
               (i + 1 == text.size() ||
                std::isspace(static_cast<unsigned char>(text[i + 1])));
    if (end) {
      auto t = trim(cur);
      if (!t.empty()) out.emplace_back(t);
      cur.clear();
    }
  }
  auto t = trim(cur);
  if (!t.empty()) out.emplace_back(t);
  return out;
}

}  // namespace

ChatResponse MockChatClient::chat(const ChatRequest& request) {
  request.validate();
  std::uint64_t h = fnv1a64(request.user, fnv1a64(request.system, seed_ ^ 0x5bd1e995))
                    ^ (request.seed.value_or(0) * 0x9E3779B97F4A7C15ULL);
  const std::string_view system = request.system;
  const std::string_view user = request.user;
  std::string text;

  if (system.rfind("As a knowledge analyzer, your task", 0) == 0) {
    auto entities = mock_entities(user, max_entities_);
    json body;
    body["summary"] = "Deterministic mock summary " + stamp(h);
    body["entities"] = entities;
    text = body.dump();
  } else if (system.rfind("You will act as a knowledge analyzer", 0) == 0) {
    bool triplet = contains(system, "three main");
    auto entities_at = user.rfind("* Entities");
    std::string entity_line =
        entities_at == std::string_view::npos
            ? std::string("* Entities (none)")
            : std::string(trim(user.substr(entities_at)));
    text = std::string("### Discussion ") + (triplet ? "(three entities) " : "(two entities) ") +
           "generated by the mock provider " + stamp(h) + "\n" + entity_line + "\n" +
           "Mock relation analysis connecting the listed entities.";
  } else if (contains(system, "question answering format")) {
    text = "Question: What does the mock ask? " + stamp(h) +
           "\nAnswer: Whatever is deterministic.";
  } else if (contains(system, "rephrase it in")) {
    std::string style = contains(system, "toddler")   ? "easy"
                        : contains(system, "Wikipedia") ? "medium"
                                                        : "hard";
    text = "Mock " + style + " paraphrase sample " +
           std::to_string(request.seed.value_or(0)) + " " + stamp(h);
  } else if (contains(system, "atomic claims")) {
    json arr = json::array();
    for (const auto& s : split_sentences(user)) arr.push_back(s);
    text = arr.dump();
  } else if (contains(system, "true or false")) {
    json arr = json::array();
    std::istringstream lines{std::string(user)};
    std::string line;
    while (std::getline(lines, line)) {
      auto t = trim(line);
      if (t.size() > 2 && std::isdigit(static_cast<unsigned char>(t[0])) &&
          t.find(". ") != std::string_view::npos) {
        std::string claim(t.substr(t.find(". ") + 2));
        std::uint64_t ch = fnv1a64(claim, seed_);
        bool truth = ch % 4 != 0;
        json judgment{{"claim", claim},
                      {"truth", truth ? "true" : "false"},
                      {"salience", !truth          ? "n/a"
                                   : (ch >> 2) % 2 ? "salient"
                                                   : "cosmetic"}};
        arr.push_back(judgment);
      }
    }
    text = arr.dump();
  } else if (contains(user, "### Thought Process and Answer")) {
    const char letter = "ABCD"[h % 4];
    text = std::string("Thought process: deterministic mock reasoning ") + stamp(h) +
           ".\nAnswer: " + letter + ".";
  } else {
    text = "mock response " + stamp(h);
  }

  ChatResponse response;
  response.text = std::move(text);
  response.usage =
      estimate_usage(request.system.size() + request.user.size(), response.text.size());
  return response;
}

ChatResponse ScriptedChatClient::chat(const ChatRequest& request) {
  request.validate();
  Step step;
  {
    std::lock_guard<std::mutex> lock(mutex_);
    if (cursor_ >= steps_.size())
      throw ProviderError("scripted chat: script exhausted");
    step = steps_[cursor_++];
  }
  if (step.fail) throw ProviderError("scripted chat: injected failure");
  ChatResponse response;
  response.text = step.text;
  response.usage = estimate_usage(request.system.size() + request.user.size(),
                                  response.text.size());
  return response;
}

int ScriptedChatClient::calls() const {
  std::lock_guard<std::mutex> lock(mutex_);
  return static_cast<int>(cursor_);
}

std::vector<EmbeddingVector> MockEmbedClient::embed(std::span<const std::string> texts) {
  std::vector<EmbeddingVector> out;
  out.reserve(texts.size());
  for (const auto& text : texts) {
    EmbeddingVector v;
    v.values.assign(static_cast<std::size_t>(dim_), 0.0f);
    auto tokens = tokenize(text);
    for (const auto& tok : tokens) {
      Rng rng(fnv1a64(tok), seed_);
      for (int d = 0; d < dim_; ++d)
        v.values[d] += static_cast<float>(rng.unit() * 2.0 - 1.0);
    }
    double norm = 0.0;
    for (float f : v.values) norm += static_cast<double>(f) * f;
    if (norm > 0) {
      auto inv = static_cast<float>(1.0 / std::sqrt(norm));
      for (float& f : v.values) f *= inv;
    } else {
      v.values[0] = 1.0f;  // empty text maps to a fixed unit vector
    }
    out.push_back(std::move(v));
  }
  return out;
}

std::vector<RankedCandidate> MockRerankClient::rerank(
    const std::string& query, std::span<const std::string> candidates) {
  auto query_tokens = tokenize(query);
  std::set<std::string> qset(query_tokens.begin(), query_tokens.end());
  std::vector<RankedCandidate> ranked;
  ranked.reserve(candidates.size());
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    auto ctoks = tokenize(candidates[i]);
    std::set<std::string> cset(ctoks.begin(), ctoks.end());
    double overlap = 0;
    for (const auto& t : cset) overlap += qset.count(t);
    ranked.push_back({i, overlap});
  }
  std::stable_sort(ranked.begin(), ranked.end(),
                   [](const RankedCandidate& a, const RankedCandidate& b) {
                     return a.score > b.score;
                   });
  return ranked;
}

ProviderSet make_providers(const ProviderConfig& config) {
  config.validate();
  ProviderSet set;
  if (config.mock) {
    set.chat = std::make_unique<MockChatClient>(config.mock_seed);
    set.embed = std::make_unique<MockEmbedClient>(config.mock_seed,
                                                  config.mock_embedding_dim);
    set.rerank = std::make_unique<MockRerankClient>();
  } else {
    set.chat = std::make_unique<HttpChatClient>(config);
    set.embed = std::make_unique<HttpEmbedClient>(config);
    set.rerank = std::make_unique<HttpRerankClient>(config);
  }
  return set;
}

}  // namespace entikit::providers
