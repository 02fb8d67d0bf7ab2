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

#include <cstdlib>
#include <functional>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "pcot/llm/types.hpp"

namespace pcot::llm {

/// One chat completion. Implementations throw the LlmError family.
class Backend {
 public:
  virtual ~Backend() = default;
  virtual BackendReply complete(const ChatRequest& req) = 0;
  /// False for backends that never touch the network (mock, replay).
  virtual bool remote() const { return false; }
};

struct ParsedUrl {
  std::string origin;  // scheme://host[:port]
  std::string path;
};

inline ParsedUrl parse_url(const std::string& url) {
  auto scheme_end = url.find("://");
  if (scheme_end == std::string::npos) throw ValidationError("endpoint_url lacks a scheme: " + url);
  auto path_start = url.find('/', scheme_end + 3);
  if (path_start == std::string::npos) return {url, "/"};
  return {url.substr(0, path_start), url.substr(path_start)};
}

/// Chat-completions style endpoint (OpenAI wire format, also served by vLLM, llama.cpp, TGI)
/// or the Anthropic messages endpoint via an adapter.
class HttpChatBackend : public Backend {
 public:
  explicit HttpChatBackend(ProviderConfig cfg) : cfg_(std::move(cfg)), url_(parse_url(cfg_.endpoint_url)) {}

  bool remote() const override { return true; }

  BackendReply complete(const ChatRequest& req) override {
    httplib::Headers headers;
    std::string credential = resolve_credential();
    nlohmann::json body;
    if (cfg_.kind == ProviderKind::anthropic) {
      body = anthropic_body(req);
      headers.emplace("anthropic-version", "2023-06-01");
      if (!credential.empty()) headers.emplace("x-api-key", credential);
    } else {
      body = openai_body(req);
      if (!credential.empty()) headers.emplace("Authorization", "Bearer " + credential);
    }

    httplib::Client cli(url_.origin);
    auto secs = static_cast<time_t>(cfg_.timeout_s);
    cli.set_connection_timeout(secs, 0);
    cli.set_read_timeout(secs, 0);
    cli.set_write_timeout(secs, 0);
    auto res = cli.Post(url_.path, headers, body.dump(), "application/json");
    if (!res) throw NetworkError("request to " + cfg_.endpoint_url + " failed: " + httplib::to_string(res.error()));
    if (res->status < 200 || res->status >= 300) {
      std::optional<double> retry_after;
      if (res->has_header("Retry-After")) {
        try {
          retry_after = std::stod(res->get_header_value("Retry-After"));
        } catch (...) {
        }
      }
      throw HttpStatusError(res->status, res->body, retry_after);
    }
    nlohmann::json raw;
    try {
      raw = nlohmann::json::parse(res->body);
    } catch (const nlohmann::json::exception& e) {
      throw ResponseFormatError(std::string("response is not JSON: ") + e.what());
    }
    BackendReply reply;
    reply.text = cfg_.kind == ProviderKind::anthropic ? anthropic_text(raw) : openai_text(raw);
    reply.raw = raw;
    reply.meta["http_status"] = res->status;
    for (const char* k : {"id", "model", "usage", "system_fingerprint", "stop_reason"})
      if (raw.contains(k)) reply.meta[k] = raw[k];
    if (cfg_.kind != ProviderKind::anthropic && raw.contains("choices") && !raw["choices"].empty() &&
        raw["choices"][0].contains("finish_reason"))
      reply.meta["finish_reason"] = raw["choices"][0]["finish_reason"];
    return reply;
  }

 private:
  std::string resolve_credential() const {
    if (cfg_.auth_ref.empty()) return {};
    const char* v = std::getenv(cfg_.auth_ref.c_str());
    if (!v || !*v) throw CredentialError("environment variable " + cfg_.auth_ref + " is not set");
    return v;
  }

  nlohmann::json openai_body(const ChatRequest& req) const {
    nlohmann::json b;
    b["model"] = req.model_id;
    b["temperature"] = req.temperature;
    b["max_tokens"] = req.max_output_tokens;
    if (req.seed) b["seed"] = *req.seed;
    auto& msgs = b["messages"] = nlohmann::json::array();
    for (const auto& t : req.turns) msgs.push_back({{"role", prompt::to_string(t.role)}, {"content", t.content}});
    return b;
  }

  // The messages endpoint takes the system prompt as a top-level field and has no seed.
  nlohmann::json anthropic_body(const ChatRequest& req) const {
    nlohmann::json b;
    b["model"] = req.model_id;
    b["temperature"] = req.temperature;
    b["max_tokens"] = req.max_output_tokens;
    auto& msgs = b["messages"] = nlohmann::json::array();
    for (const auto& t : req.turns) {
      if (t.role == prompt::Role::system)
        b["system"] = t.content;
      else
        msgs.push_back({{"role", prompt::to_string(t.role)}, {"content", t.content}});
    }
    return b;
  }

  static std::string openai_text(const nlohmann::json& raw) {
    try {
      const auto& msg = raw.at("choices").at(0).at("message");
      const auto& content = msg.at("content");
      if (content.is_string()) return content.get<std::string>();
      if (content.is_array()) {
        std::string out;
        for (const auto& part : content)
          if (part.value("type", "") == "text") out += part.value("text", "");
        return out;
      }
    } catch (const nlohmann::json::exception&) {
    }
    throw ResponseFormatError("response has no choices[0].message.content");
  }

  static std::string anthropic_text(const nlohmann::json& raw) {
    if (!raw.contains("content") || !raw["content"].is_array())
      throw ResponseFormatError("response has no content blocks");
    std::string out;
    bool any = false;
    for (const auto& block : raw["content"])
      if (block.value("type", "") == "text") {
        out += block.value("text", "");
        any = true;
      }
    if (!any) throw ResponseFormatError("response has no text block");
    return out;
  }

  ProviderConfig cfg_;
  ParsedUrl url_;
};

/// Offline backend driven by a responder function.
class MockBackend : public Backend {
 public:
  using Responder = std::function<std::string(const ChatRequest&)>;

  explicit MockBackend(Responder r) : responder_(std::move(r)) {}

  /// Replies with the final user turn verbatim.
  static std::shared_ptr<MockBackend> echo() {
    return std::make_shared<MockBackend>([](const ChatRequest& req) { return req.turns.back().content; });
  }

  /// Replies with the scripted texts in order, cycling.
  static std::shared_ptr<MockBackend> scripted(std::vector<std::string> replies) {
    if (replies.empty()) throw ValidationError("scripted mock needs at least one reply");
    auto state = std::make_shared<std::pair<std::mutex, std::size_t>>();
    return std::make_shared<MockBackend>([replies = std::move(replies), state](const ChatRequest&) {
      std::lock_guard<std::mutex> g(state->first);
      return replies[state->second++ % replies.size()];
    });
  }

  BackendReply complete(const ChatRequest& req) override {
    BackendReply r;
    r.text = responder_(req);
    r.raw = {{"mock", true}, {"text", r.text}};
    r.meta["mock"] = true;
    return r;
  }

 private:
  Responder responder_;
};

/// Cache-only provider: every request must already be recorded.
class ReplayBackend : public Backend {
 public:
  BackendReply complete(const ChatRequest& req) override {
    throw CacheMissError("no cached response for model " + req.model_id + " (replay-only provider)");
  }
};

}  // namespace pcot::llm
