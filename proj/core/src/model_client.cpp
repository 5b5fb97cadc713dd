#include "sacot/model_client.hpp"

#include <chrono>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <thread>

#include <openssl/evp.h>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "sacot/error.hpp"

namespace sacot {

namespace {

using nlohmann::json;

std::string utc_timestamp() {
  const std::time_t now = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

struct Url {
  std::string origin;  // scheme://host[:port]
  std::string path;    // "/v1"
};

Url split_url(const std::string& url) {
  const auto scheme_end = url.find("://");
  const auto host_start = scheme_end == std::string::npos ? 0 : scheme_end + 3;
  const auto path_start = url.find('/', host_start);
  Url out;
  if (path_start == std::string::npos) {
    out.origin = url;
  } else {
    out.origin = url.substr(0, path_start);
    out.path = url.substr(path_start);
  }
  while (!out.path.empty() && out.path.back() == '/') out.path.pop_back();
  return out;
}

bool retryable(int status) { return status < 0 || status == 408 || status == 429 || status >= 500; }

}  // namespace

std::string sha256_hex(std::string_view data) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int length = 0;
  EVP_Digest(data.data(), data.size(), digest, &length, EVP_sha256(), nullptr);
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out;
  out.reserve(length * 2);
  for (unsigned int i = 0; i < length; ++i) {
    out.push_back(kHex[digest[i] >> 4]);
    out.push_back(kHex[digest[i] & 0x0f]);
  }
  return out;
}

ResponseCache::ResponseCache(std::string path) : path_(std::move(path)) {
  if (path_.empty() || !std::filesystem::exists(path_)) return;
  std::ifstream in(path_);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      const json record = json::parse(line);
      entries_[record.at("key").get<std::string>()] = record.at("response_text").get<std::string>();
    } catch (const json::exception&) {
      throw CacheCorruption(path_, line_no);
    }
  }
}

std::string ResponseCache::key_for(std::string_view model_name, std::string_view prompt_text) {
  std::string material(model_name);
  material.push_back('\0');
  material.append(prompt_text);
  return sha256_hex(material);
}

std::optional<std::string> ResponseCache::get(const std::string& key) const {
  std::lock_guard lock(mutex_);
  auto it = entries_.find(key);
  if (it == entries_.end()) return std::nullopt;
  return it->second;
}

void ResponseCache::put(const std::string& key, const std::string& model, const std::string& response_text) {
  std::lock_guard lock(mutex_);
  entries_[key] = response_text;
  if (path_.empty()) return;
  json record;
  record["key"] = key;
  record["model"] = model;
  record["created_at"] = utc_timestamp();
  record["response_text"] = response_text;
  std::ofstream out(path_, std::ios::app);
  if (!out) throw Error("cannot append to cache " + path_);
  out << record.dump() << '\n';
}

std::size_t ResponseCache::size() const {
  std::lock_guard lock(mutex_);
  return entries_.size();
}

std::string build_request_body(const ModelEndpointConfig& config, const PromptText& prompt) {
  json body;
  body["model"] = config.model_name;
  body["messages"] = json::array({json{{"role", "user"}, {"content", prompt.text}}});
  body["temperature"] = config.temperature;
  body["max_tokens"] = config.max_output_tokens;
  return body.dump();
}

std::string query_model(const ModelEndpointConfig& config, const PromptText& prompt, ResponseCache& cache) {
  const std::string key = ResponseCache::key_for(config.model_name, prompt.text);
  if (auto hit = cache.get(key)) return *hit;

  const Url url = split_url(config.base_url);
  httplib::Client client(url.origin);
  client.set_connection_timeout(std::chrono::seconds(config.request_timeout_seconds));
  client.set_read_timeout(std::chrono::seconds(config.request_timeout_seconds));
  client.set_write_timeout(std::chrono::seconds(config.request_timeout_seconds));

  httplib::Headers headers;
  if (!config.api_key_env.empty()) {
    if (const char* api_key = std::getenv(config.api_key_env.c_str()); api_key != nullptr && *api_key != '\0') {
      headers.emplace("Authorization", std::string("Bearer ") + api_key);
    }
  }
  const std::string body = build_request_body(config, prompt);
  const std::string path = url.path + "/chat/completions";

  int last_status = -1;
  std::string last_error;
  for (int attempt = 0; attempt <= config.max_retries; ++attempt) {
    if (attempt > 0) {
      std::this_thread::sleep_for(std::chrono::milliseconds(config.retry_backoff_ms) * (1 << (attempt - 1)));
    }
    auto res = client.Post(path, headers, body, "application/json");
    if (!res) {
      last_status = -1;
      last_error = httplib::to_string(res.error());
      continue;
    }
    last_status = res->status;
    if (res->status == 200) {
      try {
        const json reply = json::parse(res->body);
        std::string text = reply.at("choices").at(0).at("message").at("content").get<std::string>();
        cache.put(key, config.model_name, text);
        return text;
      } catch (const json::exception& e) {
        throw EndpointError(res->status, std::string("malformed completion: ") + e.what());
      }
    }
    last_error = res->body.substr(0, 200);
    if (!retryable(res->status)) break;
  }
  throw EndpointError(last_status, last_error);
}

}  // namespace sacot
