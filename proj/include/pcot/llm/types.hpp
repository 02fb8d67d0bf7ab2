// Copyright 2026 The pcot-harness Authors
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

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "pcot/error.hpp"
#include "pcot/prompt/types.hpp"

namespace pcot::llm {

class LlmError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Non-2xx reply. Carries the response body.
class HttpStatusError : public LlmError {
 public:
  HttpStatusError(int status, std::string body, std::optional<double> retry_after_s = std::nullopt)
      : LlmError("HTTP " + std::to_string(status) + ": " + body.substr(0, 300)),
        status_(status), body_(std::move(body)), retry_after_s_(retry_after_s) {}
  int status() const noexcept { return status_; }
  const std::string& body() const noexcept { return body_; }
  std::optional<double> retry_after_s() const noexcept { return retry_after_s_; }
  bool retryable() const noexcept { return status_ == 408 || status_ == 429 || status_ >= 500; }

 private:
  int status_;
  std::string body_;
  std::optional<double> retry_after_s_;
};

class NetworkError : public LlmError {
 public:
  using LlmError::LlmError;
};

class CredentialError : public LlmError {
 public:
  using LlmError::LlmError;
};

/// Reply parsed but without generated text.
class ResponseFormatError : public LlmError {
 public:
  using LlmError::LlmError;
};

/// Replay-only provider asked for a request that is not cached.
class CacheMissError : public LlmError {
 public:
  using LlmError::LlmError;
};

enum class ProviderKind { openai, anthropic, mock, replay };

inline ProviderKind parse_provider_kind(const std::string& s) {
  if (s == "openai" || s == "chat") return ProviderKind::openai;
  if (s == "anthropic") return ProviderKind::anthropic;
  if (s == "mock") return ProviderKind::mock;
  if (s == "replay") return ProviderKind::replay;
  throw ValidationError("unknown provider kind '" + s + "'");
}

inline std::string to_string(ProviderKind k) {
  switch (k) {
    case ProviderKind::openai: return "openai";
    case ProviderKind::anthropic: return "anthropic";
    case ProviderKind::mock: return "mock";
    case ProviderKind::replay: return "replay";
  }
  return "?";
}

struct RetryPolicy {
  int max_attempts = 4;
  double base_delay_ms = 500;
  double max_delay_ms = 30000;
  double jitter = 0.5;  // fraction of each delay drawn at random
};

struct ProviderConfig {
  std::string name;  // rate limits are shared by configs with the same name
  ProviderKind kind = ProviderKind::openai;
  std::string endpoint_url;
  std::string model_id;
  std::string auth_ref;  // environment variable holding the credential; empty means none
  double temperature = 0.0;
  std::optional<std::int64_t> seed;
  int max_output_tokens = 512;
  int requests_per_minute = 60;
  int parallelism = 4;
  double timeout_s = 120;
  RetryPolicy retry;
  nlohmann::json options = nlohmann::json::object();  // provider-specific extras (mock mode, ...)

  void validate() const {
    if (model_id.empty()) throw ValidationError("provider model_id is empty");
    if (!(temperature >= 0)) throw ValidationError("temperature must be >= 0");
    if (max_output_tokens <= 0) throw ValidationError("max_output_tokens must be positive");
    if (requests_per_minute <= 0) throw ValidationError("requests_per_minute must be positive");
    if (parallelism <= 0) throw ValidationError("parallelism must be positive");
    if (retry.max_attempts <= 0) throw ValidationError("retry budget must be positive");
    if ((kind == ProviderKind::openai || kind == ProviderKind::anthropic) && endpoint_url.empty())
      throw ValidationError("endpoint_url required for provider '" + name + "'");
  }

  std::string label() const { return name.empty() ? model_id : name; }
};

inline ProviderConfig provider_from_json(const nlohmann::json& j) {
  ProviderConfig c;
  c.model_id = j.at("model_id").get<std::string>();
  c.name = j.value("name", c.model_id);
  c.kind = parse_provider_kind(j.value("kind", std::string("openai")));
  c.endpoint_url = j.value("endpoint_url", "");
  c.auth_ref = j.value("auth_ref", "");
  c.temperature = j.value("temperature", 0.0);
  if (j.contains("seed") && !j["seed"].is_null()) c.seed = j["seed"].get<std::int64_t>();
  c.max_output_tokens = j.value("max_output_tokens", c.max_output_tokens);
  c.requests_per_minute = j.value("requests_per_minute", c.requests_per_minute);
  c.parallelism = j.value("parallelism", c.parallelism);
  c.timeout_s = j.value("timeout_s", c.timeout_s);
  if (auto it = j.find("retry"); it != j.end()) {
    c.retry.max_attempts = it->value("max_attempts", c.retry.max_attempts);
    c.retry.base_delay_ms = it->value("base_delay_ms", c.retry.base_delay_ms);
    c.retry.max_delay_ms = it->value("max_delay_ms", c.retry.max_delay_ms);
    c.retry.jitter = it->value("jitter", c.retry.jitter);
  }
  if (auto it = j.find("options"); it != j.end()) c.options = *it;
  c.validate();
  return c;
}

/// Wire-level request handed to a backend.
struct ChatRequest {
  std::string model_id;
  std::vector<prompt::DialogueTurn> turns;
  double temperature = 0;
  std::optional<std::int64_t> seed;
  int max_output_tokens = 512;
  std::string target_text;  // instance text, for mock responders
  prompt::Task task = prompt::Task::rhyme;
};

struct BackendReply {
  std::string text;
  nlohmann::json raw = nlohmann::json::object();  // full provider response
  nlohmann::json meta = nlohmann::json::object();
};

struct GenerationResult {
  std::string text;
  double latency_ms = 0;
  nlohmann::json provider_meta = nlohmann::json::object();
  bool cache_hit = false;
};

}  // namespace pcot::llm
