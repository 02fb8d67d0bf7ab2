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

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <random>
#include <thread>
#include <vector>

#include "pcot/llm/backends.hpp"
#include "pcot/llm/cache.hpp"
#include "pcot/llm/types.hpp"

namespace pcot::llm {

/// Spaces request starts at 60/rpm seconds.
class RateLimiter {
 public:
  explicit RateLimiter(int requests_per_minute)
      : interval_(std::chrono::microseconds(60'000'000LL / std::max(1, requests_per_minute))) {}

  void acquire() {
    std::chrono::steady_clock::time_point slot;
    {
      std::lock_guard<std::mutex> g(mu_);
      auto now = std::chrono::steady_clock::now();
      slot = std::max(now, next_);
      next_ = slot + interval_;
    }
    std::this_thread::sleep_until(slot);
  }

  /// Limiter shared by every client in the process with the same provider name and rate.
  static std::shared_ptr<RateLimiter> shared(const std::string& provider, int rpm) {
    static std::mutex mu;
    static std::map<std::pair<std::string, int>, std::shared_ptr<RateLimiter>> registry;
    std::lock_guard<std::mutex> g(mu);
    auto& slot = registry[{provider, rpm}];
    if (!slot) slot = std::make_shared<RateLimiter>(rpm);
    return slot;
  }

 private:
  std::chrono::steady_clock::duration interval_;
  std::mutex mu_;
  std::chrono::steady_clock::time_point next_{};
};

struct BatchItem {
  std::optional<GenerationResult> result;
  std::string error;
  bool ok() const { return result.has_value(); }
};

class LlmClient {
 public:
  using Sleeper = std::function<void(std::chrono::milliseconds)>;

  LlmClient(ProviderConfig cfg, std::shared_ptr<Backend> backend, std::shared_ptr<ResponseCache> cache = nullptr)
      : cfg_(std::move(cfg)), backend_(std::move(backend)), cache_(std::move(cache)),
        limiter_(RateLimiter::shared(cfg_.label(), cfg_.requests_per_minute)),
        rng_(std::random_device{}()),
        sleep_([](std::chrono::milliseconds d) { std::this_thread::sleep_for(d); }) {
    cfg_.validate();
    if (!backend_) throw ValidationError("client needs a backend");
  }

  const ProviderConfig& config() const { return cfg_; }

  /// Replaces the backoff sleep; tests use it to record delays.
  void set_sleeper(Sleeper s) { sleep_ = std::move(s); }

  /// Backend invocations so far, including failed attempts.
  std::size_t backend_calls() const { return calls_.load(); }

  GenerationResult generate(const prompt::PromptBundle& bundle) {
    auto inputs = cache_key_inputs(cfg_.model_id, cfg_.temperature, cfg_.seed, bundle.turns);
    auto key = cache_key(inputs);
    if (!cache_) return call(bundle, key).result;

    auto lock = cache_->key_lock(key);
    std::lock_guard<std::mutex> g(*lock);
    if (auto rec = cache_->get(key); rec && rec->contains("response")) {
      GenerationResult r;
      r.text = (*rec)["response"].at("text").get<std::string>();
      r.provider_meta = rec->value("meta", nlohmann::json::object());
      r.provider_meta["cache_key"] = key;
      r.cache_hit = true;
      return r;
    }
    auto [r, raw] = call(bundle, key);
    nlohmann::json rec;
    rec["key"] = key;
    rec["request"] = inputs;
    rec["response"] = {{"text", r.text}, {"raw", raw}};
    rec["meta"] = r.provider_meta;
    rec["latency_ms"] = r.latency_ms;
    cache_->put(key, rec);
    return r;
  }

  std::vector<BatchItem> generate_batch(const std::vector<prompt::PromptBundle>& bundles) {
    if (bundles.empty()) throw ValidationError("empty batch");
    std::vector<BatchItem> out(bundles.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
      for (std::size_t i = next++; i < bundles.size(); i = next++) {
        try {
          out[i].result = generate(bundles[i]);
        } catch (const std::exception& e) {
          out[i].error = e.what();
        }
      }
    };
    std::size_t n = std::min<std::size_t>(static_cast<std::size_t>(cfg_.parallelism), bundles.size());
    std::vector<std::thread> pool;
    for (std::size_t i = 0; i < n; ++i) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
    return out;
  }

  /// Backoff before retry number `retry` (0-based), before jitter.
  static double backoff_ms(const RetryPolicy& p, int retry) {
    return std::min(p.max_delay_ms, p.base_delay_ms * std::pow(2.0, retry));
  }

 private:
  struct CallOutcome {
    GenerationResult result;
    nlohmann::json raw;
  };

  CallOutcome call(const prompt::PromptBundle& bundle, const std::string& key) {
    ChatRequest req{cfg_.model_id, bundle.turns, cfg_.temperature, cfg_.seed, cfg_.max_output_tokens,
                    bundle.target_text, bundle.task};
    int retries = 0;
    for (int attempt = 1;; ++attempt) {
      try {
        if (backend_->remote()) limiter_->acquire();
        ++calls_;
        auto t0 = std::chrono::steady_clock::now();
        BackendReply reply = backend_->complete(req);
        auto t1 = std::chrono::steady_clock::now();
        GenerationResult r;
        r.text = std::move(reply.text);
        r.latency_ms = std::chrono::duration<double, std::milli>(t1 - t0).count();
        r.provider_meta = std::move(reply.meta);
        r.provider_meta["retries"] = retries;
        r.provider_meta["provider"] = cfg_.label();
        r.provider_meta["cache_key"] = key;
        return {std::move(r), std::move(reply.raw)};
      } catch (const HttpStatusError& e) {
        if (!e.retryable() || attempt >= cfg_.retry.max_attempts) throw;
        wait(retries++, e.retry_after_s());
      } catch (const NetworkError&) {
        if (attempt >= cfg_.retry.max_attempts) throw;
        wait(retries++, std::nullopt);
      }
    }
  }

  void wait(int retry, std::optional<double> retry_after_s) {
    double d = backoff_ms(cfg_.retry, retry);
    {
      std::lock_guard<std::mutex> g(rng_mu_);
      std::uniform_real_distribution<double> u(0.0, 1.0);
      d = d * (1.0 - cfg_.retry.jitter) + d * cfg_.retry.jitter * u(rng_);
    }
    if (retry_after_s) d = std::min(cfg_.retry.max_delay_ms, std::max(d, *retry_after_s * 1000.0));
    sleep_(std::chrono::milliseconds(static_cast<long long>(d)));
  }

  ProviderConfig cfg_;
  std::shared_ptr<Backend> backend_;
  std::shared_ptr<ResponseCache> cache_;
  std::shared_ptr<RateLimiter> limiter_;
  std::mutex rng_mu_;
  std::mt19937_64 rng_;
  Sleeper sleep_;
  std::atomic<std::size_t> calls_{0};
};

/// Backend for a config. Mock providers need a responder; the runner supplies one.
inline std::shared_ptr<Backend> make_backend(const ProviderConfig& cfg, MockBackend::Responder mock = nullptr) {
  switch (cfg.kind) {
    case ProviderKind::openai:
    case ProviderKind::anthropic:
      return std::make_shared<HttpChatBackend>(cfg);
    case ProviderKind::replay:
      return std::make_shared<ReplayBackend>();
    case ProviderKind::mock:
      if (mock) return std::make_shared<MockBackend>(std::move(mock));
      return MockBackend::echo();
  }
  throw ValidationError("unsupported provider kind");
}

}  // namespace pcot::llm
