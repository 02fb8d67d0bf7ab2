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
#include <chrono>
#include <condition_variable>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <set>
#include <thread>
#include <variant>

#include <nlohmann/json.hpp>

#include "pcot/llm/client.hpp"
#include "pcot/prompt/builder.hpp"
#include "pcot/runner/config.hpp"
#include "pcot/runner/dataset.hpp"
#include "pcot/runner/mock.hpp"

#ifndef PCOT_VERSION
#define PCOT_VERSION "0.0.0"
#endif

namespace pcot::runner {

struct RunPaths {
  std::filesystem::path dir;
  std::filesystem::path records() const { return dir / "records.jsonl"; }
  std::filesystem::path errors() const { return dir / "errors.jsonl"; }
  std::filesystem::path manifest() const { return dir / "manifest.json"; }
  std::filesystem::path report_dir() const { return dir / "report"; }
};

inline RunPaths run_paths(const RunConfig& c) { return {c.output_dir / c.run_id}; }

struct Job {
  std::size_t provider;
  prompt::Strategy strategy;
  const eval::TaskInstance* instance;
  std::string model;

  std::string key() const { return job_key(model, strategy.id(), instance->task, instance->id); }

  static std::string job_key(const std::string& model, const std::string& strategy, prompt::Task task,
                             const std::string& id) {
    return model + '\t' + strategy + '\t' + std::string(prompt::to_string(task)) + '\t' + id;
  }
};

struct RunManifest {
  std::string run_id;
  std::string config_digest;
  std::string harness_version = PCOT_VERSION;
  std::string started_at;
  std::string finished_at;
  std::size_t total = 0, completed = 0, errored = 0, pending = 0;
  std::string status;  // "complete" or "partial"

  nlohmann::json to_json() const {
    return {{"run_id", run_id},
            {"config_digest", config_digest},
            {"harness_version", harness_version},
            {"started_at", started_at},
            {"finished_at", finished_at},
            {"jobs", {{"total", total}, {"completed", completed}, {"errored", errored}, {"pending", pending}}},
            {"status", status}};
  }

  static RunManifest from_json(const nlohmann::json& j) {
    RunManifest m;
    m.run_id = j.at("run_id").get<std::string>();
    m.config_digest = j.value("config_digest", "");
    m.harness_version = j.value("harness_version", "");
    m.started_at = j.value("started_at", "");
    m.finished_at = j.value("finished_at", "");
    const auto& jobs = j.at("jobs");
    m.total = jobs.value("total", 0u);
    m.completed = jobs.value("completed", 0u);
    m.errored = jobs.value("errored", 0u);
    m.pending = jobs.value("pending", 0u);
    m.status = j.value("status", "");
    return m;
  }
};

struct RunOutcome {
  RunManifest manifest;
  std::size_t provider_calls = 0;  // backend invocations in this execution
  std::size_t new_records = 0;

  int exit_code() const { return manifest.status == "complete" && manifest.errored == 0 ? 0 : 2; }
};

struct RunHooks {
  /// Overrides backend construction (tests inject instrumented backends).
  std::function<std::shared_ptr<llm::Backend>(const llm::ProviderConfig&, const std::vector<eval::TaskInstance>&)> backend;
  /// Progress callback: (committed jobs, pending jobs).
  std::function<void(std::size_t, std::size_t)> progress;
};

inline std::string utc_now() {
  auto t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

/// Digest of the fields that define the job set and scoring; execution knobs are excluded.
inline std::string config_digest(const RunConfig& c) {
  nlohmann::json j = c.source;
  for (const char* k : {"stop_after_jobs", "parallelism", "output_dir", "cache_dir"}) j.erase(k);
  return llm::sha256_hex(j.dump());
}

inline void write_file_atomic(const std::filesystem::path& path, const std::string& content) {
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + tmp.string());
    out << content;
    if (!out) throw IoError("short write to " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw IoError("cannot move " + tmp.string() + " into place: " + ec.message());
}

/// Reads records.jsonl. A torn final line (interrupted write) is cut off; earlier bad lines are errors.
inline std::vector<nlohmann::json> load_record_lines(const std::filesystem::path& path, bool repair = false) {
  std::vector<nlohmann::json> out;
  std::ifstream in(path, std::ios::binary);
  if (!in) return out;
  std::string data((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  in.close();
  std::size_t start = 0, lineno = 0;
  while (start < data.size()) {
    auto nl = data.find('\n', start);
    ++lineno;
    if (nl == std::string::npos) {
      // No terminating newline: the write was interrupted.
      if (repair) std::filesystem::resize_file(path, start);
      break;
    }
    std::string_view line(data.data() + start, nl - start);
    if (!text::trim(line).empty()) {
      try {
        out.push_back(nlohmann::json::parse(line));
      } catch (const nlohmann::json::exception& e) {
        throw FormatError(path.string(), lineno, e.what());
      }
    }
    start = nl + 1;
  }
  return out;
}

inline std::vector<eval::EvalRecord> load_records(const RunPaths& paths) {
  std::vector<eval::EvalRecord> out;
  for (const auto& j : load_record_lines(paths.records())) out.push_back(eval::record_from_json(j));
  return out;
}

/// Instances per task, loaded from the configured datasets.
struct LoadedInputs {
  std::optional<phonology::PronunciationLexicon> lexicon;
  std::map<prompt::Task, IngestResult> datasets;
  std::vector<eval::TaskInstance> all;
};

inline LoadedInputs load_inputs(const RunConfig& c) {
  LoadedInputs in;
  if (!c.lexicon.empty()) in.lexicon = phonology::load_lexicon_file(c.lexicon.string());
  for (const auto& [task, path] : c.datasets) {
    auto r = ingest_dataset(path, task, in.lexicon ? &*in.lexicon : nullptr);
    in.all.insert(in.all.end(), r.instances.begin(), r.instances.end());
    in.datasets.emplace(task, std::move(r));
  }
  return in;
}

inline RunOutcome run(const RunConfig& cfg, const RunHooks& hooks = {}) {
  cfg.validate();
  const std::string started = utc_now();
  const auto inputs = load_inputs(cfg);
  const prompt::TemplateStore store =
      prompt::TemplateStore::load(cfg.templates ? *cfg.templates : std::filesystem::path(PCOT_TEMPLATE_DIR));

  // Jobs in deterministic (model, strategy, task, instance id) order.
  std::vector<std::pair<prompt::Task, const eval::TaskInstance*>> insts;
  for (const auto& i : inputs.all) insts.emplace_back(i.task, &i);
  std::vector<Job> jobs;
  for (std::size_t p = 0; p < cfg.providers.size(); ++p)
    for (const auto& s : cfg.strategies)
      for (const auto& [task, inst] : insts) jobs.push_back({p, s, inst, cfg.providers[p].label()});
  std::sort(jobs.begin(), jobs.end(), [](const Job& a, const Job& b) {
    return std::make_tuple(a.model, a.strategy.id(), prompt::to_string(a.instance->task), a.instance->id) <
           std::make_tuple(b.model, b.strategy.id(), prompt::to_string(b.instance->task), b.instance->id);
  });
  {
    std::set<std::string> keys;
    for (const auto& j : jobs)
      if (!keys.insert(j.key()).second) throw ValidationError("duplicate job " + j.key());
  }

  const RunPaths paths = run_paths(cfg);
  std::error_code ec;
  std::filesystem::create_directories(paths.dir, ec);
  if (ec) throw IoError("cannot create run directory " + paths.dir.string() + ": " + ec.message());

  const std::string digest = config_digest(cfg);
  if (std::filesystem::exists(paths.manifest())) {
    std::ifstream in(paths.manifest());
    auto prev = RunManifest::from_json(nlohmann::json::parse(in));
    if (prev.config_digest != digest)
      throw ValidationError("run '" + cfg.run_id + "' exists with a different configuration");
  }

  std::set<std::string> done;
  for (const auto& j : load_record_lines(paths.records(), /*repair=*/true))
    done.insert(Job::job_key(j.at("model_id").get<std::string>(), j.at("strategy").get<std::string>(),
                             prompt::parse_task(j.at("task").get<std::string>()), j.at("instance_id").get<std::string>()));

  std::vector<const Job*> pending;
  for (const auto& j : jobs)
    if (!done.count(j.key())) pending.push_back(&j);
  const std::size_t already = jobs.size() - pending.size();
  std::size_t to_run = pending.size();
  if (cfg.stop_after_jobs) to_run = std::min(to_run, *cfg.stop_after_jobs);

  auto cache = std::make_shared<llm::ResponseCache>(cfg.cache_dir ? *cfg.cache_dir : cfg.output_dir / "cache");
  std::vector<std::unique_ptr<llm::LlmClient>> clients;
  for (const auto& pc : cfg.providers) {
    auto backend = hooks.backend ? hooks.backend(pc, inputs.all)
                                 : llm::make_backend(pc, pc.kind == llm::ProviderKind::mock
                                                             ? make_mock_responder(pc, inputs.all)
                                                             : llm::MockBackend::Responder{});
    clients.push_back(std::make_unique<llm::LlmClient>(pc, backend, cache));
  }

  // Workers fill result slots; this thread commits them in job order.
  using Slot = std::variant<std::monostate, eval::EvalRecord, std::string>;
  std::vector<Slot> slots(to_run);
  std::mutex mu;
  std::condition_variable cv;
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < to_run; i = next++) {
      const Job& job = *pending[i];
      Slot result;
      try {
        auto bundle = prompt::build_prompt(store, job.instance->task, job.strategy, job.instance->input_text);
        auto gen = clients[job.provider]->generate(bundle);
        auto rec = eval::evaluate(*job.instance, gen.text, job.model, job.strategy.id(), cfg.scoring);
        rec.temperature = cfg.providers[job.provider].temperature;
        rec.seed = cfg.providers[job.provider].seed;
        result = std::move(rec);
      } catch (const std::exception& e) {
        result = std::string(e.what());
      }
      {
        std::lock_guard<std::mutex> g(mu);
        slots[i] = std::move(result);
      }
      cv.notify_all();
    }
  };
  std::vector<std::thread> pool;
  const std::size_t nthreads = std::min<std::size_t>(static_cast<std::size_t>(cfg.parallelism), to_run);
  for (std::size_t i = 0; i < nthreads; ++i) pool.emplace_back(worker);

  std::size_t errored = 0, written = 0;
  std::exception_ptr io_failure;
  {
    std::ofstream records(paths.records(), std::ios::binary | std::ios::app);
    std::ofstream errors(paths.errors(), std::ios::binary | std::ios::app);
    if (!records || !errors) io_failure = std::make_exception_ptr(IoError("cannot open run files in " + paths.dir.string()));
    for (std::size_t i = 0; i < to_run; ++i) {
      Slot s;
      {
        std::unique_lock<std::mutex> lk(mu);
        cv.wait(lk, [&] { return slots[i].index() != 0; });
        s = std::move(slots[i]);
      }
      if (io_failure) continue;
      const Job& job = *pending[i];
      if (auto* rec = std::get_if<eval::EvalRecord>(&s)) {
        auto j = eval::to_json(*rec);
        j["run_id"] = cfg.run_id;
        records << llm::dump_lossy(j) << '\n';
        records.flush();
        ++written;
      } else {
        nlohmann::json j = {{"run_id", cfg.run_id}, {"model_id", job.model}, {"strategy", job.strategy.id()},
                            {"task", prompt::to_string(job.instance->task)}, {"instance_id", job.instance->id},
                            {"error", std::get<std::string>(s)}};
        errors << llm::dump_lossy(j) << '\n';
        errors.flush();
        ++errored;
      }
      if (!records || !errors) io_failure = std::make_exception_ptr(IoError("write failed in " + paths.dir.string()));
      if (hooks.progress) hooks.progress(i + 1, to_run);
    }
  }
  for (auto& t : pool) t.join();
  if (io_failure) std::rethrow_exception(io_failure);

  RunOutcome out;
  for (const auto& c : clients) out.provider_calls += c->backend_calls();
  out.new_records = written;
  auto& m = out.manifest;
  m.run_id = cfg.run_id;
  m.config_digest = digest;
  m.started_at = started;
  m.finished_at = utc_now();
  m.total = jobs.size();
  m.completed = already + written;
  m.errored = errored;
  m.pending = m.total - m.completed - m.errored;
  m.status = m.pending == 0 ? "complete" : "partial";
  write_file_atomic(paths.manifest(), m.to_json().dump(2) + "\n");
  return out;
}

inline RunManifest load_manifest(const RunPaths& paths) {
  std::ifstream in(paths.manifest(), std::ios::binary);
  if (!in) throw IoError("no manifest in " + paths.dir.string() + " (unknown run id?)");
  try {
    return RunManifest::from_json(nlohmann::json::parse(in));
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(paths.manifest().string() + ": " + e.what());
  }
}

}  // namespace pcot::runner
