#pragma once

// Single-turn chat-completion client for OpenAI-compatible endpoints, with an
// append-only response cache.

#include <cstddef>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>

#include "sacot/prompt_builder.hpp"

namespace sacot {

struct ModelEndpointConfig {
  /// Base URL including the API prefix, e.g. "http://localhost:8000/v1".
  std::string base_url = "http://localhost:8000/v1";
  std::string model_name;
  /// Name of the environment variable holding the API key (may be unset).
  std::string api_key_env = "OPENAI_API_KEY";
  /// Greedy decoding.
  double temperature = 0.0;
  int max_output_tokens = 2048;
  int request_timeout_seconds = 120;
  int max_parallel = 4;
  int max_retries = 3;
  int retry_backoff_ms = 500;
};

/// Lower-case hex SHA-256.
std::string sha256_hex(std::string_view data);

/// JSONL cache of model responses keyed by sha256(model_name, prompt text).
/// Records: {key, model, created_at, response_text}. Writes are serialized.
class ResponseCache {
 public:
  /// In-memory only when `path` is empty. Throws CacheCorruption on a bad record.
  explicit ResponseCache(std::string path = {});

  static std::string key_for(std::string_view model_name, std::string_view prompt_text);

  std::optional<std::string> get(const std::string& key) const;
  void put(const std::string& key, const std::string& model, const std::string& response_text);
  std::size_t size() const;
  const std::string& path() const noexcept { return path_; }

 private:
  std::string path_;
  mutable std::mutex mutex_;
  std::unordered_map<std::string, std::string> entries_;
};

/// Serialized chat-completion request: one user message carrying the prompt.
std::string build_request_body(const ModelEndpointConfig& config, const PromptText& prompt);

/// Returns the cached response or performs one chat-completion request.
/// Retries repeat the identical request with exponential backoff; throws
/// EndpointError once retries are exhausted or on a non-retryable status.
std::string query_model(const ModelEndpointConfig& config, const PromptText& prompt, ResponseCache& cache);

}  // namespace sacot
