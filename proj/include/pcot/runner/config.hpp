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

#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "pcot/error.hpp"
#include "pcot/eval/record.hpp"
#include "pcot/llm/types.hpp"
#include "pcot/prompt/types.hpp"

namespace pcot::runner {

struct RunConfig {
  std::string run_id;
  std::filesystem::path output_dir;
  std::filesystem::path lexicon;
  std::optional<std::filesystem::path> templates;
  std::optional<std::filesystem::path> cache_dir;  // default: <output_dir>/cache
  std::map<prompt::Task, std::filesystem::path> datasets;
  std::vector<llm::ProviderConfig> providers;
  std::vector<prompt::Strategy> strategies;
  int parallelism = 4;
  eval::EvalOptions scoring;
  std::optional<std::size_t> stop_after_jobs;  // stop early, leaving the run resumable
  nlohmann::json source = nlohmann::json::object();  // config as read, for the digest

  void validate() const {
    if (run_id.empty()) throw ValidationError("run_id is empty");
    if (run_id.find('/') != std::string::npos || run_id == "." || run_id == "..")
      throw ValidationError("run_id must be a plain name");
    if (providers.empty()) throw ValidationError("no providers configured");
    if (strategies.empty()) throw ValidationError("no strategies configured");
    if (datasets.empty()) throw ValidationError("no datasets configured");
    if (parallelism <= 0) throw ValidationError("parallelism must be positive");
    std::map<std::string, int> names;
    for (const auto& p : providers)
      if (++names[p.label()] > 1) throw ValidationError("duplicate provider name '" + p.label() + "'");
    for (const auto& [task, path] : datasets)
      if (!std::filesystem::exists(path)) throw ValidationError("dataset not found: " + path.string());
    if (!lexicon.empty() && !std::filesystem::exists(lexicon))
      throw ValidationError("lexicon not found: " + lexicon.string());
    if (templates && !std::filesystem::is_directory(*templates))
      throw ValidationError("template directory not found: " + templates->string());
  }
};

/// Parses a run config; relative paths resolve against `base_dir`.
inline RunConfig run_config_from_json(const nlohmann::json& j, const std::filesystem::path& base_dir) {
  auto resolve = [&](const std::string& p) {
    std::filesystem::path path(p);
    return path.is_absolute() ? path : (base_dir / path).lexically_normal();
  };
  RunConfig c;
  try {
    c.source = j;
    c.run_id = j.at("run_id").get<std::string>();
    c.output_dir = resolve(j.value("output_dir", "runs"));
    if (j.contains("lexicon")) c.lexicon = resolve(j["lexicon"].get<std::string>());
    if (j.contains("templates")) c.templates = resolve(j["templates"].get<std::string>());
    if (j.contains("cache_dir")) c.cache_dir = resolve(j["cache_dir"].get<std::string>());
    for (const auto& [k, v] : j.at("datasets").items()) c.datasets[prompt::parse_task(k)] = resolve(v.get<std::string>());
    for (const auto& p : j.at("providers")) c.providers.push_back(llm::provider_from_json(p));
    for (const auto& s : j.at("strategies")) c.strategies.push_back(prompt::Strategy::parse(s.get<std::string>()));
    c.parallelism = j.value("parallelism", c.parallelism);
    if (auto it = j.find("scoring"); it != j.end()) {
      auto denom = it->value("sr_denominator", std::string("requested"));
      if (denom == "requested") c.scoring.denominator = eval::SrDenominator::requested;
      else if (denom == "generated") c.scoring.denominator = eval::SrDenominator::generated;
      else throw ValidationError("sr_denominator must be 'requested' or 'generated'");
      auto match = it->value("ipa_match", std::string("strict"));
      if (match == "strict") c.scoring.ipa = phonology::IpaNormalizeOptions::strict();
      else if (match == "lenient") c.scoring.ipa = phonology::IpaNormalizeOptions::lenient();
      else throw ValidationError("ipa_match must be 'strict' or 'lenient'");
    }
    if (j.contains("stop_after_jobs")) c.stop_after_jobs = j["stop_after_jobs"].get<std::size_t>();
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("config: ") + e.what());
  }
  c.validate();
  return c;
}

inline RunConfig load_run_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open config " + path.string());
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(path.string() + ": " + e.what());
  }
  return run_config_from_json(j, std::filesystem::absolute(path).parent_path());
}

}  // namespace pcot::runner
