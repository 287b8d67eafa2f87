#pragma once

#include <cstdint>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "entikit/common.hpp"

namespace entikit::providers {

/// Connection settings for a chat/embedding/rerank service. API keys are
/// read from the environment variable named by api_key_env, never from
/// config files.
struct ProviderConfig {
  std::string base_url;     // e.g. https://api.example.com/v1
  std::string model_id;
  std::string api_key_env;  // empty = unauthenticated
  double timeout_seconds = 60.0;
  int max_retries = 3;
  int max_in_flight = 4;
  double temperature = 0.0;
  double retry_backoff_seconds = 0.5;  // doubled per attempt, capped at 8s

  bool mock = false;  // deterministic offline providers
  std::uint64_t mock_seed = 0;
  int mock_embedding_dim = 256;

  void validate() const;
};

struct TokenUsage {
  std::int64_t prompt_tokens = 0;
  std::int64_t completion_tokens = 0;
  bool estimated = false;  // true when derived from the bytes/4 heuristic
};

/// Fallback when a provider does not report usage.
TokenUsage estimate_usage(std::size_t prompt_bytes, std::size_t completion_bytes);

struct ChatRequest {
  std::string system;
  std::string user;
  double temperature = 0.0;
  std::optional<std::uint64_t> seed;  // sampling hint, passed through

  void validate() const;  // user message must be non-empty
};

struct ChatResponse {
  std::string text;
  TokenUsage usage;
  int retries = 0;  // transient failures absorbed before success
};

struct EmbeddingVector {
  std::vector<float> values;
  std::size_t dim() const { return values.size(); }
};

struct RankedCandidate {
  std::size_t index = 0;  // position in the input candidate list
  double score = 0.0;
};

class ChatClient {
 public:
  virtual ~ChatClient() = default;
  virtual ChatResponse chat(const ChatRequest& request) = 0;
};

class EmbedClient {
 public:
  virtual ~EmbedClient() = default;
  /// Batched; output order matches input order. Empty input -> empty output.
  virtual std::vector<EmbeddingVector> embed(std::span<const std::string> texts) = 0;
};

class RerankClient {
 public:
  virtual ~RerankClient() = default;
  /// Scores every candidate against the query; result is ordered from most
  /// to least relevant.
  virtual std::vector<RankedCandidate> rerank(const std::string& query,
                                              std::span<const std::string> candidates) = 0;
};

namespace detail {
class HttpTransport;
}

/// Chat-completions-style JSON client. Retries transient failures
/// (connection errors, timeouts, 408/429/5xx) with exponential backoff;
/// authentication and malformed-response errors are not retried. At most
/// max_in_flight requests run concurrently per client.
class HttpChatClient : public ChatClient {
 public:
  explicit HttpChatClient(const ProviderConfig& config);
  ~HttpChatClient() override;
  ChatResponse chat(const ChatRequest& request) override;

 private:
  std::unique_ptr<detail::HttpTransport> transport_;
  std::string model_id_;
};

class HttpEmbedClient : public EmbedClient {
 public:
  explicit HttpEmbedClient(const ProviderConfig& config);
  ~HttpEmbedClient() override;
  std::vector<EmbeddingVector> embed(std::span<const std::string> texts) override;

 private:
  std::unique_ptr<detail::HttpTransport> transport_;
  std::string model_id_;
};

class HttpRerankClient : public RerankClient {
 public:
  explicit HttpRerankClient(const ProviderConfig& config);
  ~HttpRerankClient() override;
  std::vector<RankedCandidate> rerank(const std::string& query,
                                      std::span<const std::string> candidates) override;

 private:
  std::unique_ptr<detail::HttpTransport> transport_;
  std::string model_id_;
};

/// Offline chat provider: a pure function of (seed, request). Recognizes the
/// pipeline prompts and answers each with a minimal, deterministic response
/// in the expected wire format; anything else gets a hash-stamped canned
/// line. Entity responses list the first distinct words of at least four
/// letters, capped at max_entities.
class MockChatClient : public ChatClient {
 public:
  explicit MockChatClient(std::uint64_t seed, int max_entities = 8)
      : seed_(seed), max_entities_(max_entities) {}
  ChatResponse chat(const ChatRequest& request) override;

 private:
  std::uint64_t seed_;
  int max_entities_;
};

/// Replays a fixed sequence of responses/failures; for tests.
class ScriptedChatClient : public ChatClient {
 public:
  struct Step {
    std::string text;
    bool fail = false;  // throw ProviderError instead of responding
  };
  explicit ScriptedChatClient(std::vector<Step> steps) : steps_(std::move(steps)) {}
  ChatResponse chat(const ChatRequest& request) override;
  int calls() const;

 private:
  mutable std::mutex mutex_;
  std::vector<Step> steps_;
  std::size_t cursor_ = 0;
};

/// Deterministic embeddings: L2-normalized sum of per-token hash vectors,
/// so texts sharing tokens land close in L2. Identical text always maps to
/// the identical vector.
class MockEmbedClient : public EmbedClient {
 public:
  explicit MockEmbedClient(std::uint64_t seed, int dim = 256)
      : seed_(seed), dim_(dim) {}
  std::vector<EmbeddingVector> embed(std::span<const std::string> texts) override;

 private:
  std::uint64_t seed_;
  int dim_;
};

/// Scores by distinct-token overlap with the query; ties keep input order.
class MockRerankClient : public RerankClient {
 public:
  std::vector<RankedCandidate> rerank(const std::string& query,
                                      std::span<const std::string> candidates) override;
};

struct ProviderSet {
  std::unique_ptr<ChatClient> chat;
  std::unique_ptr<EmbedClient> embed;
  std::unique_ptr<RerankClient> rerank;
};

/// Builds HTTP or mock providers according to config.mock.
ProviderSet make_providers(const ProviderConfig& config);

}  // namespace entikit::providers
