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
#include <map>
#include <optional>
#include <string>
#include <tuple>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "pcot/eval/parse.hpp"
#include "pcot/eval/score.hpp"
#include "pcot/prompt/types.hpp"

namespace pcot::eval {

enum class SubsetTag { common, rare, high, low, none };

inline std::string to_string(SubsetTag t) {
  switch (t) {
    case SubsetTag::common: return "common";
    case SubsetTag::rare: return "rare";
    case SubsetTag::high: return "high";
    case SubsetTag::low: return "low";
    case SubsetTag::none: return "none";
  }
  return "?";
}

inline SubsetTag parse_subset_tag(const std::string& s) {
  for (auto t : {SubsetTag::common, SubsetTag::rare, SubsetTag::high, SubsetTag::low, SubsetTag::none})
    if (to_string(t) == s) return t;
  throw ValidationError("unknown subset tag '" + s + "'");
}

struct SyllableGold {
  unsigned count = 0;
  bool heuristic = false;  // derived from the fallback rule for at least one token
};

using Gold = std::variant<phonology::RhymeGoldSet, std::vector<phonology::IpaTranscription>, SyllableGold>;

struct TaskInstance {
  prompt::Task task;
  std::string id;
  std::string input_text;
  Gold gold;
  SubsetTag subset = SubsetTag::none;

  /// Throws unless the gold alternative matches the task.
  void validate() const {
    bool ok = (task == prompt::Task::rhyme && std::holds_alternative<phonology::RhymeGoldSet>(gold)) ||
              (task == prompt::Task::g2p && std::holds_alternative<std::vector<phonology::IpaTranscription>>(gold)) ||
              (task == prompt::Task::syllable && std::holds_alternative<SyllableGold>(gold));
    if (!ok) throw ValidationError("instance " + id + ": gold type does not match task");
    if (task == prompt::Task::g2p && std::get<1>(gold).empty())
      throw ValidationError("instance " + id + ": no gold transcription");
    if (input_text.empty()) throw ValidationError("instance " + id + ": empty input_text");
  }
};

struct EvalOptions {
  SrDenominator denominator = SrDenominator::requested;
  phonology::IpaNormalizeOptions ipa = phonology::IpaNormalizeOptions::strict();
};

struct EvalRecord {
  std::string instance_id;
  prompt::Task task = prompt::Task::rhyme;
  std::string model_id;
  std::string strategy;
  SubsetTag subset = SubsetTag::none;
  std::string input_text;
  std::string raw_text;
  nlohmann::json parsed;  // null on parse failure
  nlohmann::json gold;    // syllable count or g2p variants; null for rhyme (gold sets are large)
  std::string parse_error;
  double score = 0;
  bool heuristic_flag = false;
  double temperature = 0;
  std::optional<std::int64_t> seed;

  bool parse_failed() const { return parsed.is_null(); }
};

/// Parses and scores one raw model output.
inline EvalRecord evaluate(const TaskInstance& inst, const std::string& raw_text, const std::string& model_id,
                           const std::string& strategy, const EvalOptions& opts = {}) {
  EvalRecord r;
  r.instance_id = inst.id;
  r.task = inst.task;
  r.model_id = model_id;
  r.strategy = strategy;
  r.subset = inst.subset;
  r.input_text = inst.input_text;
  r.raw_text = raw_text;
  r.parsed = nullptr;
  r.gold = nullptr;
  switch (inst.task) {
    case prompt::Task::rhyme: {
      const auto& gold = std::get<phonology::RhymeGoldSet>(inst.gold);
      auto p = parse_rhyme_response(raw_text, inst.input_text);
      if (p.ok()) {
        r.parsed = *p.value;
        r.score = score_rhyme(*p.value, gold, opts.denominator);
      } else {
        r.parse_error = p.error;
      }
      break;
    }
    case prompt::Task::g2p: {
      const auto& gold = std::get<std::vector<phonology::IpaTranscription>>(inst.gold);
      r.gold = nlohmann::json::array();
      for (const auto& g : gold) r.gold.push_back(g.text);
      auto p = parse_g2p_response(raw_text, opts.ipa);
      if (p.ok()) {
        r.parsed = p.value->text;
        r.score = score_exact_match(*p.value, gold, opts.ipa);
      } else {
        r.parse_error = p.error;
      }
      break;
    }
    case prompt::Task::syllable: {
      const auto& gold = std::get<SyllableGold>(inst.gold);
      r.heuristic_flag = gold.heuristic;
      r.gold = gold.count;
      auto p = parse_syllable_response(raw_text);
      if (p.ok()) {
        r.parsed = *p.value;
        r.score = score_exact_match(*p.value, static_cast<long long>(gold.count));
      } else {
        r.parse_error = p.error;
      }
      break;
    }
  }
  return r;
}

inline nlohmann::json to_json(const EvalRecord& r) {
  nlohmann::json j;
  j["instance_id"] = r.instance_id;
  j["task"] = prompt::to_string(r.task);
  j["model_id"] = r.model_id;
  j["strategy"] = r.strategy;
  j["subset_tag"] = to_string(r.subset);
  j["input_text"] = r.input_text;
  j["raw_text"] = r.raw_text;
  j["parsed"] = r.parsed;
  j["gold"] = r.gold;
  j["parse_error"] = r.parse_error.empty() ? nlohmann::json(nullptr) : nlohmann::json(r.parse_error);
  j["score"] = r.score;
  j["heuristic_flag"] = r.heuristic_flag;
  j["temperature"] = r.temperature;
  j["seed"] = r.seed ? nlohmann::json(*r.seed) : nlohmann::json(nullptr);
  return j;
}

inline EvalRecord record_from_json(const nlohmann::json& j) {
  EvalRecord r;
  r.instance_id = j.at("instance_id").get<std::string>();
  r.task = prompt::parse_task(j.at("task").get<std::string>());
  r.model_id = j.at("model_id").get<std::string>();
  r.strategy = j.at("strategy").get<std::string>();
  r.subset = parse_subset_tag(j.value("subset_tag", "none"));
  r.input_text = j.value("input_text", "");
  r.raw_text = j.value("raw_text", "");
  r.parsed = j.value("parsed", nlohmann::json(nullptr));
  r.gold = j.value("gold", nlohmann::json(nullptr));
  if (j.contains("parse_error") && j["parse_error"].is_string()) r.parse_error = j["parse_error"].get<std::string>();
  r.score = j.at("score").get<double>();
  r.heuristic_flag = j.value("heuristic_flag", false);
  r.temperature = j.value("temperature", 0.0);
  if (j.contains("seed") && !j["seed"].is_null()) r.seed = j["seed"].get<std::int64_t>();
  if (r.score < 0 || r.score > 1) throw ValidationError("record " + r.instance_id + ": score outside [0,1]");
  return r;
}

struct MetricSummary {
  std::string model_id;
  std::string strategy;
  prompt::Task task;
  SubsetTag subset;
  double mean_score = 0;  // percentage
  std::size_t n = 0;
  double parse_failure_rate = 0;
};

/// One row per (model, strategy, task, subset) group present in the input.
inline std::vector<MetricSummary> aggregate(const std::vector<EvalRecord>& records) {
  struct Acc {
    double sum = 0;
    std::size_t n = 0, failures = 0;
  };
  using Key = std::tuple<std::string, std::string, prompt::Task, SubsetTag>;
  std::map<Key, Acc> groups;
  for (const auto& r : records) {
    auto& a = groups[{r.model_id, r.strategy, r.task, r.subset}];
    a.sum += r.score;
    ++a.n;
    a.failures += r.parse_failed() ? 1 : 0;
  }
  std::vector<MetricSummary> out;
  for (const auto& [k, a] : groups) {
    MetricSummary m{std::get<0>(k), std::get<1>(k), std::get<2>(k), std::get<3>(k)};
    m.n = a.n;
    m.mean_score = 100.0 * a.sum / static_cast<double>(a.n);
    m.parse_failure_rate = static_cast<double>(a.failures) / static_cast<double>(a.n);
    out.push_back(m);
  }
  return out;
}

}  // namespace pcot::eval
