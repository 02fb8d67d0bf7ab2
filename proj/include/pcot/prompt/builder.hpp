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
#include <filesystem>
#include <fstream>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "pcot/error.hpp"
#include "pcot/prompt/exemplars.hpp"
#include "pcot/prompt/types.hpp"
#include "pcot/util/text.hpp"

#ifndef PCOT_TEMPLATE_DIR
#define PCOT_TEMPLATE_DIR "data/templates"
#endif

namespace pcot::prompt {

/// Dialogue templates keyed by (task, strategy), loaded from `<task>_<strategy>.json` files,
/// plus the per-task scaffolding phrases from `scaffolding.json`.
class TemplateStore {
 public:
  static TemplateStore load(const std::filesystem::path& dir) {
    TemplateStore store;
    for (Task task : kAllTasks) {
      for (const Strategy& s : Strategy::all()) {
        auto path = dir / (std::string(to_string(task)) + "_" + s.id() + ".json");
        if (!std::filesystem::exists(path)) continue;
        store.templates_.emplace(std::make_pair(task, s), parse_template(path, task, s));
      }
    }
    auto scaffold_path = dir / "scaffolding.json";
    if (std::filesystem::exists(scaffold_path)) {
      auto doc = read_json(scaffold_path);
      for (Task task : kAllTasks) {
        auto it = doc.find(std::string(to_string(task)));
        if (it == doc.end()) continue;
        for (const auto& p : *it) store.scaffolding_[task].push_back(p.get<std::string>());
      }
    }
    if (store.templates_.empty()) throw IoError("no prompt templates found in " + dir.string());
    return store;
  }

  bool supports(Task task, const Strategy& s) const { return templates_.count({task, s}) != 0; }

  const std::vector<DialogueTurn>& turns(Task task, const Strategy& s) const {
    auto it = templates_.find({task, s});
    if (it == templates_.end())
      throw ValidationError("unsupported (task, strategy) pair: (" + std::string(to_string(task)) + ", " + s.id() + ")");
    return it->second;
  }

  const std::vector<std::string>& scaffolding(Task task) const {
    static const std::vector<std::string> none;
    auto it = scaffolding_.find(task);
    return it == scaffolding_.end() ? none : it->second;
  }

 private:
  static nlohmann::json read_json(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    if (!in) throw IoError("cannot open " + p.string());
    try {
      return nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
      throw ValidationError(p.string() + ": " + e.what());
    }
  }

  static std::vector<DialogueTurn> parse_template(const std::filesystem::path& p, Task task, const Strategy& s) {
    auto doc = read_json(p);
    if (doc.value("task", "") != to_string(task) || doc.value("strategy", "") != s.id())
      throw ValidationError(p.string() + ": task/strategy fields do not match the file name");
    std::vector<DialogueTurn> turns;
    for (const auto& t : doc.at("turns"))
      turns.emplace_back(parse_role(t.at("role").get<std::string>()), t.at("content").get<std::string>());
    if (turns.empty() || turns.back().role != Role::user)
      throw ValidationError(p.string() + ": template must end with a user turn");
    for (std::size_t i = 0; i + 1 < turns.size(); ++i)
      if (turns[i].content.find(kPlaceholder) != std::string::npos)
        throw ValidationError(p.string() + ": placeholder outside the final user turn");
    if (turns.back().content.find(kPlaceholder) == std::string::npos)
      throw ValidationError(p.string() + ": final user turn lacks the placeholder");
    return turns;
  }

  std::map<std::pair<Task, Strategy>, std::vector<DialogueTurn>> templates_;
  std::map<Task, std::vector<std::string>> scaffolding_;
};

/// Store loaded from $PCOT_TEMPLATE_DIR, else the compiled-in template directory.
inline const TemplateStore& default_template_store() {
  static const TemplateStore store = [] {
    const char* env = std::getenv("PCOT_TEMPLATE_DIR");
    return TemplateStore::load(env && *env ? env : PCOT_TEMPLATE_DIR);
  }();
  return store;
}

inline PromptBundle build_prompt(const TemplateStore& store, Task task, const Strategy& strategy,
                                 const std::string& instance_text) {
  if (text::trim(instance_text).empty()) throw ValidationError("instance text is empty");
  if (instance_text.find(kPlaceholder) != std::string::npos)
    throw ValidationError("instance text contains the literal placeholder");
  std::vector<DialogueTurn> turns = store.turns(task, strategy);
  turns.back().content = text::replace_all(turns.back().content, kPlaceholder, instance_text);
  return PromptBundle{task, strategy, std::move(turns), instance_text};
}

inline PromptBundle build_prompt(Task task, const Strategy& strategy, const std::string& instance_text) {
  return build_prompt(default_template_store(), task, strategy, instance_text);
}

// ---------------------------------------------------------------------------
// Structural validation

enum class CheckId { structure, role_setting, concept_definition, exemplar_count, scaffold_removal };

constexpr std::string_view to_string(CheckId c) {
  switch (c) {
    case CheckId::structure: return "structure";
    case CheckId::role_setting: return "role_setting";
    case CheckId::concept_definition: return "concept_definition";
    case CheckId::exemplar_count: return "exemplar_count";
    case CheckId::scaffold_removal: return "scaffold_removal";
  }
  return "?";
}

struct CheckResult {
  CheckId id;
  bool applicable;
  bool passed;
  std::string detail;
};

struct ValidationReport {
  std::vector<CheckResult> checks;

  bool ok() const {
    for (const auto& c : checks)
      if (c.applicable && !c.passed) return false;
    return true;
  }

  std::vector<CheckResult> violations() const {
    std::vector<CheckResult> out;
    for (const auto& c : checks)
      if (c.applicable && !c.passed) out.push_back(c);
    return out;
  }

  const CheckResult& get(CheckId id) const {
    for (const auto& c : checks)
      if (c.id == id) return c;
    throw std::out_of_range("check not in report");
  }
};

/// Phrase that states the task concept in P-CoT dialogues.
inline std::string_view concept_marker(Task task) {
  switch (task) {
    case Task::rhyme: return "same ending sound";
    case Task::g2p: return "General American English (GAE)";
    case Task::syllable: return "one vowel sound";
  }
  return "";
}

/// Worked examples a well-formed bundle must carry. The published rhyme P-CoT1 dialogue
/// is a single request with no worked example, so it expects zero.
inline int expected_exemplar_count(Task task, const Strategy& s) {
  if (task == Task::rhyme && s == Strategy::pcot(1)) return 0;
  return s.shots();
}

/// Number of distinct bank exemplars present. Non-final turns are searched for the input
/// text; the final turn only counts "input → " pairs, so the substituted target is ignored.
inline int count_exemplars(const PromptBundle& b) {
  int n = 0;
  for (const auto& ex : few_shot_exemplars(b.task)) {
    bool found = false;
    for (std::size_t i = 0; i + 1 < b.turns.size() && !found; ++i)
      found = b.turns[i].content.find(ex.input) != std::string::npos;
    if (!found && !b.turns.empty())
      found = b.turns.back().content.find(ex.input + " → ") != std::string::npos;
    n += found ? 1 : 0;
  }
  return n;
}

inline ValidationReport validate_template(const PromptBundle& b, const TemplateStore& store) {
  ValidationReport r;
  const bool pcot = b.strategy.is_pcot();

  {
    std::size_t systems = 0;
    bool placeholder = false;
    for (const auto& t : b.turns) {
      systems += t.role == Role::system ? 1 : 0;
      placeholder = placeholder || t.content.find(kPlaceholder) != std::string::npos;
    }
    std::string detail;
    if (b.turns.empty()) detail = "no turns";
    else if (systems != 1) detail = "expected exactly one system turn, found " + std::to_string(systems);
    else if (b.turns.back().role != Role::user) detail = "final turn is not a user turn";
    else if (placeholder) detail = "unsubstituted placeholder";
    r.checks.push_back({CheckId::structure, true, detail.empty(), detail});
  }

  {
    bool present = !b.turns.empty() && b.turns.front().role == Role::system;
    bool persona = present && (!pcot || text::contains_icase(b.turns.front().content, "expert"));
    r.checks.push_back({CheckId::role_setting, true, persona,
                        !present ? "first turn is not a system turn" : persona ? "" : "system turn sets no expert persona"});
  }

  {
    bool found = false;
    for (const auto& t : b.turns) found = found || t.content.find(concept_marker(b.task)) != std::string::npos;
    r.checks.push_back({CheckId::concept_definition, pcot, found,
                        found ? "" : "missing concept phrase '" + std::string(concept_marker(b.task)) + "'"});
  }

  {
    int have = count_exemplars(b);
    int want = expected_exemplar_count(b.task, b.strategy);
    r.checks.push_back({CheckId::exemplar_count, true, have == want,
                        "found " + std::to_string(have) + ", expected " + std::to_string(want)});
  }

  {
    std::string hit;
    if (pcot && !b.turns.empty())
      for (const auto& phrase : store.scaffolding(b.task))
        if (hit.empty() && text::contains_icase(b.turns.back().content, phrase)) hit = phrase;
    r.checks.push_back({CheckId::scaffold_removal, pcot, hit.empty(),
                        hit.empty() ? "" : "final request keeps scaffold step '" + hit + "'"});
  }
  return r;
}

inline ValidationReport validate_template(const PromptBundle& b) {
  return validate_template(b, default_template_store());
}

}  // namespace pcot::prompt
