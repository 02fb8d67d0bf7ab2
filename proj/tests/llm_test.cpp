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

#include <gtest/gtest.h>

#include <atomic>
#include <chrono>
#include <cstdlib>
#include <thread>

#include "pcot/llm/client.hpp"
#include "pcot/prompt/builder.hpp"
#include "test_support.hpp"

using namespace pcot;
using namespace pcot::llm;
using pcot::testing::ScratchDir;

namespace {

prompt::PromptBundle bundle(const std::string& word, prompt::Strategy s = prompt::Strategy::pcot(1)) {
  return prompt::build_prompt(prompt::TemplateStore::load(pcot::testing::template_dir()), prompt::Task::rhyme, s, word);
}

ProviderConfig mock_config(const std::string& name = "mock-test") {
  ProviderConfig c;
  c.name = name;
  c.kind = ProviderKind::mock;
  c.model_id = "mock-model";
  c.requests_per_minute = 600000;
  c.retry.base_delay_ms = 1;
  c.retry.jitter = 0;
  return c;
}

/// Local HTTP server on an ephemeral port, stopped on destruction.
class LocalServer {
 public:
  LocalServer() {
    port_ = srv_.bind_to_any_port("127.0.0.1");
    thread_ = std::thread([this] { srv_.listen_after_bind(); });
    srv_.wait_until_ready();
  }
  ~LocalServer() {
    srv_.stop();
    thread_.join();
  }
  httplib::Server& server() { return srv_; }
  std::string url(const std::string& path) const { return "http://127.0.0.1:" + std::to_string(port_) + path; }

 private:
  httplib::Server srv_;
  int port_ = 0;
  std::thread thread_;
};

ProviderConfig http_config(const std::string& url, ProviderKind kind = ProviderKind::openai) {
  ProviderConfig c;
  c.name = "http-" + url;
  c.kind = kind;
  c.endpoint_url = url;
  c.model_id = "test-model";
  c.requests_per_minute = 600000;
  c.retry.max_attempts = 3;
  c.retry.base_delay_ms = 1;
  c.retry.jitter = 0;
  c.timeout_s = 5;
  return c;
}

std::string openai_reply(const std::string& text) {
  return nlohmann::json{{"id", "x"}, {"choices", {{{"message", {{"role", "assistant"}, {"content", text}}}, {"finish_reason", "stop"}}}}}
      .dump();
}

}  // namespace

TEST(CacheKey, PureFunctionOfInputs) {
  auto b = bundle("education");
  auto k = cache_key(cache_key_inputs("m", 0.0, 42, b.turns));
  EXPECT_EQ(k, cache_key(cache_key_inputs("m", 0.0, 42, b.turns)));
  EXPECT_EQ(k.size(), 64u);
  EXPECT_NE(k, cache_key(cache_key_inputs("m2", 0.0, 42, b.turns)));
  EXPECT_NE(k, cache_key(cache_key_inputs("m", 0.5, 42, b.turns)));
  EXPECT_NE(k, cache_key(cache_key_inputs("m", 0.0, 43, b.turns)));
  EXPECT_NE(k, cache_key(cache_key_inputs("m", 0.0, std::nullopt, b.turns)));
}

TEST(CacheKey, AnyTurnByteChangesKey) {
  auto b = bundle("education", prompt::Strategy::pcot(3));
  auto base = cache_key(cache_key_inputs("m", 0.0, 1, b.turns));
  std::mt19937 rng(3);
  for (int trial = 0; trial < 200; ++trial) {
    auto turns = b.turns;
    auto& t = turns[rng() % turns.size()];
    std::size_t pos = rng() % t.content.size();
    t.content[pos] = static_cast<char>(t.content[pos] ^ (1 + rng() % 127));
    EXPECT_NE(base, cache_key(cache_key_inputs("m", 0.0, 1, turns)));
  }
  auto swapped = b.turns;
  swapped[1].role = prompt::Role::assistant;
  EXPECT_NE(base, cache_key(cache_key_inputs("m", 0.0, 1, swapped)));
}

TEST(Sha256, KnownVector) {
  EXPECT_EQ(sha256_hex("abc"), "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST(Generate, EchoMock) {
  LlmClient c(mock_config(), MockBackend::echo());
  auto b = bundle("education");
  auto r = c.generate(b);
  EXPECT_EQ(r.text, b.turns.back().content);
  EXPECT_FALSE(r.cache_hit);
}

TEST(Generate, ScriptedMockCycles) {
  LlmClient c(mock_config(), MockBackend::scripted({"one", "two"}));
  EXPECT_EQ(c.generate(bundle("a")).text, "one");
  EXPECT_EQ(c.generate(bundle("b")).text, "two");
  EXPECT_EQ(c.generate(bundle("c")).text, "one");
}

TEST(Generate, RepeatedCallHitsCache) {
  ScratchDir dir("cache");
  auto cache = std::make_shared<ResponseCache>(dir.path());
  LlmClient c(mock_config(), MockBackend::scripted({"  first\n", "second"}), cache);
  auto b = bundle("education");
  auto r1 = c.generate(b);
  auto r2 = c.generate(b);
  EXPECT_FALSE(r1.cache_hit);
  EXPECT_TRUE(r2.cache_hit);
  EXPECT_EQ(r1.text, "  first\n");  // verbatim, untrimmed
  EXPECT_EQ(r2.text, r1.text);
  EXPECT_EQ(c.backend_calls(), 1u);
}

TEST(Generate, CorruptCacheFileIsAMiss) {
  ScratchDir dir("cache");
  auto cache = std::make_shared<ResponseCache>(dir.path());
  auto cfg = mock_config();
  auto b = bundle("education");
  auto key = cache_key(cache_key_inputs(cfg.model_id, cfg.temperature, cfg.seed, b.turns));
  std::filesystem::create_directories(cache->path_for(key).parent_path());
  std::ofstream(cache->path_for(key)) << "{ torn";
  LlmClient c(cfg, MockBackend::scripted({"fresh"}), cache);
  auto r = c.generate(b);
  EXPECT_FALSE(r.cache_hit);
  EXPECT_EQ(r.text, "fresh");
  EXPECT_TRUE(c.generate(b).cache_hit);
}

TEST(Generate, ReplayProviderServesRecordedResponses) {
  ScratchDir dir("cache");
  auto cache = std::make_shared<ResponseCache>(dir.path());
  auto cfg = mock_config();
  LlmClient recorder(cfg, MockBackend::scripted({"recorded"}), cache);
  recorder.generate(bundle("education"));

  auto replay_cfg = cfg;
  replay_cfg.kind = ProviderKind::replay;
  LlmClient replay(replay_cfg, make_backend(replay_cfg), cache);
  auto r = replay.generate(bundle("education"));
  EXPECT_TRUE(r.cache_hit);
  EXPECT_EQ(r.text, "recorded");
  EXPECT_THROW(replay.generate(bundle("population")), CacheMissError);
}

TEST(Generate, ConcurrentSameKeyCallsBackendOnce) {
  ScratchDir dir("cache");
  auto cache = std::make_shared<ResponseCache>(dir.path());
  auto backend = std::make_shared<MockBackend>([](const ChatRequest&) {
    std::this_thread::sleep_for(std::chrono::milliseconds(20));
    return std::string("x");
  });
  LlmClient c(mock_config(), backend, cache);
  std::vector<prompt::PromptBundle> same(8, bundle("education"));
  auto out = c.generate_batch(same);
  for (const auto& o : out) EXPECT_TRUE(o.ok());
  EXPECT_EQ(c.backend_calls(), 1u);
}

TEST(Http, RetriesAfter429) {
  LocalServer s;
  std::atomic<int> hits{0};
  s.server().Post("/v1/chat/completions", [&](const httplib::Request&, httplib::Response& res) {
    if (hits++ == 0) {
      res.status = 429;
      res.set_content("{\"error\":\"slow down\"}", "application/json");
      return;
    }
    res.set_content(openai_reply("passport"), "application/json");
  });
  auto cfg = http_config(s.url("/v1/chat/completions"));
  LlmClient c(cfg, make_backend(cfg));
  auto r = c.generate(bundle("transport"));
  EXPECT_EQ(r.text, "passport");
  EXPECT_EQ(r.provider_meta["retries"], 1);
  EXPECT_EQ(hits.load(), 2);
}

TEST(Http, OpenAiRequestShape) {
  LocalServer s;
  nlohmann::json seen;
  std::string auth;
  s.server().Post("/chat", [&](const httplib::Request& req, httplib::Response& res) {
    seen = nlohmann::json::parse(req.body);
    auth = req.get_header_value("Authorization");
    res.set_content(openai_reply("ok"), "application/json");
  });
  auto cfg = http_config(s.url("/chat"));
  cfg.seed = 1234;
  cfg.temperature = 0;
  cfg.max_output_tokens = 64;
  cfg.auth_ref = "PCOT_TEST_KEY_OPENAI";
  ::setenv("PCOT_TEST_KEY_OPENAI", "sk-test", 1);
  LlmClient c(cfg, make_backend(cfg));
  auto b = bundle("education");
  c.generate(b);
  EXPECT_EQ(auth, "Bearer sk-test");
  EXPECT_EQ(seen["model"], "test-model");
  EXPECT_EQ(seen["seed"], 1234);
  EXPECT_EQ(seen["max_tokens"], 64);
  ASSERT_EQ(seen["messages"].size(), b.turns.size());
  EXPECT_EQ(seen["messages"][0]["role"], "system");
  EXPECT_EQ(seen["messages"].back()["content"], b.turns.back().content);
}

TEST(Http, AnthropicAdapter) {
  LocalServer s;
  nlohmann::json seen;
  std::string key;
  s.server().Post("/v1/messages", [&](const httplib::Request& req, httplib::Response& res) {
    seen = nlohmann::json::parse(req.body);
    key = req.get_header_value("x-api-key");
    nlohmann::json reply = {{"id", "m"}, {"content", {{{"type", "text"}, {"text", "a, "}}, {{"type", "text"}, {"text", "b"}}}}};
    res.set_content(reply.dump(), "application/json");
  });
  auto cfg = http_config(s.url("/v1/messages"), ProviderKind::anthropic);
  cfg.auth_ref = "PCOT_TEST_KEY_ANTHROPIC";
  ::setenv("PCOT_TEST_KEY_ANTHROPIC", "ak-test", 1);
  LlmClient c(cfg, make_backend(cfg));
  auto b = bundle("transport", prompt::Strategy::pcot(3));
  auto r = c.generate(b);
  EXPECT_EQ(r.text, "a, b");
  EXPECT_EQ(key, "ak-test");
  EXPECT_EQ(seen["system"], b.turns.front().content);
  EXPECT_EQ(seen["messages"].size(), b.turns.size() - 1);
  EXPECT_EQ(seen["messages"][0]["role"], "user");
}

TEST(Http, ErrorStatusCarriesBodyAndIsNotRetried) {
  LocalServer s;
  std::atomic<int> hits{0};
  s.server().Post("/c", [&](const httplib::Request&, httplib::Response& res) {
    ++hits;
    res.status = 400;
    res.set_content("bad request body", "text/plain");
  });
  auto cfg = http_config(s.url("/c"));
  LlmClient c(cfg, make_backend(cfg));
  try {
    c.generate(bundle("cat"));
    FAIL() << "expected HttpStatusError";
  } catch (const HttpStatusError& e) {
    EXPECT_EQ(e.status(), 400);
    EXPECT_EQ(e.body(), "bad request body");
  }
  EXPECT_EQ(hits.load(), 1);
}

TEST(Http, RetryBudgetBoundsAttempts) {
  LocalServer s;
  std::atomic<int> hits{0};
  s.server().Post("/c", [&](const httplib::Request&, httplib::Response& res) {
    ++hits;
    res.status = 503;
  });
  auto cfg = http_config(s.url("/c"));
  cfg.retry.max_attempts = 4;
  LlmClient c(cfg, make_backend(cfg));
  std::vector<long long> delays;
  c.set_sleeper([&](std::chrono::milliseconds d) { delays.push_back(d.count()); });
  EXPECT_THROW(c.generate(bundle("cat")), HttpStatusError);
  EXPECT_EQ(hits.load(), 4);
  EXPECT_EQ(delays, (std::vector<long long>{1, 2, 4}));
}

TEST(Http, MissingTextIsAResponseError) {
  LocalServer s;
  s.server().Post("/c", [&](const httplib::Request&, httplib::Response& res) {
    res.set_content("{\"choices\":[]}", "application/json");
  });
  auto cfg = http_config(s.url("/c"));
  LlmClient c(cfg, make_backend(cfg));
  EXPECT_THROW(c.generate(bundle("cat")), ResponseFormatError);
}

TEST(Http, NetworkFailureAfterBudget) {
  auto cfg = http_config("http://127.0.0.1:1/c");  // nothing listens on port 1
  LlmClient c(cfg, make_backend(cfg));
  c.set_sleeper([](std::chrono::milliseconds) {});
  EXPECT_THROW(c.generate(bundle("cat")), NetworkError);
  EXPECT_EQ(c.backend_calls(), 3u);
}

TEST(Http, CredentialOnlyNeededOnMiss) {
  ScratchDir dir("cache");
  auto cache = std::make_shared<ResponseCache>(dir.path());
  auto cfg = http_config("http://127.0.0.1:9/unused");
  cfg.auth_ref = "PCOT_TEST_KEY_UNSET";
  ::unsetenv("PCOT_TEST_KEY_UNSET");
  LlmClient c(cfg, make_backend(cfg), cache);
  EXPECT_THROW(c.generate(bundle("cat")), CredentialError);

  auto b = bundle("dog");
  auto key = cache_key(cache_key_inputs(cfg.model_id, cfg.temperature, cfg.seed, b.turns));
  cache->put(key, {{"response", {{"text", "cached"}}}});
  auto r = c.generate(b);
  EXPECT_TRUE(r.cache_hit);
  EXPECT_EQ(r.text, "cached");
}

TEST(Backoff, ExponentialWithCap) {
  RetryPolicy p;
  p.base_delay_ms = 100;
  p.max_delay_ms = 1000;
  EXPECT_DOUBLE_EQ(LlmClient::backoff_ms(p, 0), 100);
  EXPECT_DOUBLE_EQ(LlmClient::backoff_ms(p, 3), 800);
  EXPECT_DOUBLE_EQ(LlmClient::backoff_ms(p, 4), 1000);
}

TEST(Backoff, JitterStaysWithinBand) {
  auto cfg = mock_config();
  cfg.retry.base_delay_ms = 100;
  cfg.retry.jitter = 0.5;
  cfg.retry.max_attempts = 6;
  std::atomic<int> n{0};
  auto backend = std::make_shared<MockBackend>([&](const ChatRequest&) -> std::string {
    if (n++ < 5) throw NetworkError("flaky");
    return "ok";
  });
  LlmClient c(cfg, backend);
  std::vector<long long> delays;
  c.set_sleeper([&](std::chrono::milliseconds d) { delays.push_back(d.count()); });
  EXPECT_EQ(c.generate(bundle("cat")).text, "ok");
  ASSERT_EQ(delays.size(), 5u);
  for (std::size_t i = 0; i < delays.size(); ++i) {
    double full = LlmClient::backoff_ms(cfg.retry, static_cast<int>(i));
    EXPECT_GE(delays[i], static_cast<long long>(full * 0.5) - 1);
    EXPECT_LE(delays[i], static_cast<long long>(full));
  }
}

TEST(Batch, ParallelismBoundsInFlight) {
  std::atomic<int> in_flight{0}, peak{0};
  auto backend = std::make_shared<MockBackend>([&](const ChatRequest& req) {
    int now = ++in_flight;
    int prev = peak.load();
    while (now > prev && !peak.compare_exchange_weak(prev, now)) {
    }
    std::this_thread::sleep_for(std::chrono::milliseconds(30));
    --in_flight;
    return req.target_text;
  });
  auto cfg = mock_config();
  cfg.parallelism = 3;
  LlmClient c(cfg, backend);
  std::vector<prompt::PromptBundle> bs;
  for (int i = 0; i < 10; ++i) bs.push_back(bundle("w" + std::to_string(i)));
  auto out = c.generate_batch(bs);
  ASSERT_EQ(out.size(), 10u);
  for (int i = 0; i < 10; ++i) EXPECT_EQ(out[i].result->text, "w" + std::to_string(i));
  EXPECT_EQ(peak.load(), 3);
}

TEST(Batch, AllCachedMakesNoCalls) {
  ScratchDir dir("cache");
  auto cache = std::make_shared<ResponseCache>(dir.path());
  std::vector<prompt::PromptBundle> bs;
  for (int i = 0; i < 6; ++i) bs.push_back(bundle("w" + std::to_string(i)));
  LlmClient first(mock_config(), MockBackend::echo(), cache);
  first.generate_batch(bs);
  LlmClient second(mock_config(), MockBackend::echo(), cache);
  auto out = second.generate_batch(bs);
  EXPECT_EQ(second.backend_calls(), 0u);
  for (const auto& o : out) EXPECT_TRUE(o.result->cache_hit);
}

TEST(Batch, PoisonedItemIsIsolated) {
  auto backend = std::make_shared<MockBackend>([](const ChatRequest& req) -> std::string {
    if (req.target_text == "w4") throw ResponseFormatError("poisoned");
    return req.target_text;
  });
  LlmClient c(mock_config(), backend);
  std::vector<prompt::PromptBundle> bs;
  for (int i = 0; i < 10; ++i) bs.push_back(bundle("w" + std::to_string(i)));
  auto out = c.generate_batch(bs);
  int ok = 0;
  for (int i = 0; i < 10; ++i) {
    if (out[i].ok()) {
      ++ok;
      EXPECT_EQ(out[i].result->text, "w" + std::to_string(i));
    } else {
      EXPECT_EQ(i, 4);
      EXPECT_NE(out[i].error.find("poisoned"), std::string::npos);
    }
  }
  EXPECT_EQ(ok, 9);
  EXPECT_THROW(c.generate_batch({}), ValidationError);
}

TEST(RateLimiter, SpacesRequests) {
  RateLimiter lim(1200);  // 50 ms apart
  auto t0 = std::chrono::steady_clock::now();
  for (int i = 0; i < 5; ++i) lim.acquire();
  auto ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
  EXPECT_GE(ms, 195.0);
}

TEST(RateLimiter, SharedPerProvider) {
  EXPECT_EQ(RateLimiter::shared("p", 60), RateLimiter::shared("p", 60));
  EXPECT_NE(RateLimiter::shared("p", 60), RateLimiter::shared("q", 60));
}

TEST(ProviderConfig, FromJson) {
  auto c = provider_from_json(nlohmann::json::parse(R"({
    "name": "local", "kind": "openai", "endpoint_url": "http://localhost:8000/v1/chat/completions",
    "model_id": "llama", "seed": 7, "retry": {"max_attempts": 2}})"));
  EXPECT_EQ(c.seed, 7);
  EXPECT_EQ(c.temperature, 0.0);
  EXPECT_EQ(c.retry.max_attempts, 2);
  EXPECT_THROW(provider_from_json(nlohmann::json::parse(R"({"model_id":"m","temperature":-1,"kind":"mock"})")),
               ValidationError);
  EXPECT_THROW(provider_from_json(nlohmann::json::parse(R"({"model_id":"m","kind":"openai"})")), ValidationError);
  EXPECT_THROW(provider_from_json(nlohmann::json::parse(R"({"model_id":"m","kind":"carrier-pigeon"})")),
               ValidationError);
}
