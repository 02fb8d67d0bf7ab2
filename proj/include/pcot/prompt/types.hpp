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

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "pcot/error.hpp"

namespace pcot::prompt {

enum class Task { rhyme, g2p, syllable };
enum class Role { system, user, assistant };

inline constexpr Task kAllTasks[] = {Task::rhyme, Task::g2p, Task::syllable};

constexpr std::string_view to_string(Task t) {
  switch (t) {
    case Task::rhyme: return "rhyme";
    case Task::g2p: return "g2p";
    case Task::syllable: return "syllable";
  }
  return "?";
}

inline Task parse_task(std::string_view s) {
  for (Task t : kAllTasks)
    if (to_string(t) == s) return t;
  throw ValidationError("unknown task '" + std::string(s) + "'");
}

constexpr std::string_view to_string(Role r) {
  switch (r) {
    case Role::system: return "system";
    case Role::user: return "user";
    case Role::assistant: return "assistant";
  }
  return "?";
}

inline Role parse_role(std::string_view s) {
  for (Role r : {Role::system, Role::user, Role::assistant})
    if (to_string(r) == s) return r;
  throw ValidationError("unknown role '" + std::string(s) + "'");
}

struct DialogueTurn {
  Role role;
  std::string content;

  DialogueTurn(Role r, std::string c) : role(r), content(std::move(c)) {
    if (content.empty()) throw ValidationError("dialogue turn content is empty");
  }

  friend bool operator==(const DialogueTurn&, const DialogueTurn&) = default;
};

/// Prompting strategy. The constructor enforces the kind/shots pairing.
class Strategy {
 public:
  enum class Kind { baseline, fewshot, pcot };

  Strategy(Kind kind, int shots) : kind_(kind), shots_(shots) {
    bool ok = false;
    switch (kind) {
      case Kind::baseline: ok = shots == 0; break;
      case Kind::fewshot: ok = shots == 3 || shots == 5; break;
      case Kind::pcot: ok = shots == 1 || shots == 3 || shots == 5; break;
    }
    if (!ok) throw ValidationError("invalid shot count " + std::to_string(shots) + " for strategy kind");
  }

  static Strategy baseline() { return {Kind::baseline, 0}; }
  static Strategy fewshot(int shots) { return {Kind::fewshot, shots}; }
  static Strategy pcot(int shots) { return {Kind::pcot, shots}; }

  /// Accepts the identifiers produced by id(): baseline, fewshot3, fewshot5, pcot1, pcot3, pcot5.
  static Strategy parse(std::string_view s) {
    if (s == "baseline") return baseline();
    auto tail = [&](std::string_view prefix) -> std::optional<int> {
      if (s.size() != prefix.size() + 1 || s.substr(0, prefix.size()) != prefix) return std::nullopt;
      char c = s.back();
      if (c < '0' || c > '9') return std::nullopt;
      return c - '0';
    };
    if (auto n = tail("fewshot")) return fewshot(*n);
    if (auto n = tail("pcot")) return pcot(*n);
    throw ValidationError("unknown strategy '" + std::string(s) + "'");
  }

  /// All six strategies in report column order.
  static std::vector<Strategy> all() {
    return {baseline(), fewshot(3), fewshot(5), pcot(1), pcot(3), pcot(5)};
  }

  Kind kind() const noexcept { return kind_; }
  int shots() const noexcept { return shots_; }
  bool is_pcot() const noexcept { return kind_ == Kind::pcot; }

  std::string id() const {
    switch (kind_) {
      case Kind::baseline: return "baseline";
      case Kind::fewshot: return "fewshot" + std::to_string(shots_);
      case Kind::pcot: return "pcot" + std::to_string(shots_);
    }
    return "?";
  }

  /// Column label used in report tables.
  std::string label() const {
    switch (kind_) {
      case Kind::baseline: return "Baseline";
      case Kind::fewshot: return std::to_string(shots_) + "-Shot";
      case Kind::pcot: return "P-CoT" + std::to_string(shots_);
    }
    return "?";
  }

  /// Strategy family: "baseline", "fewshot" or "pcot".
  std::string family() const {
    switch (kind_) {
      case Kind::baseline: return "baseline";
      case Kind::fewshot: return "fewshot";
      case Kind::pcot: return "pcot";
    }
    return "?";
  }

  friend bool operator==(const Strategy&, const Strategy&) = default;
  friend auto operator<=>(const Strategy&, const Strategy&) = default;

 private:
  Kind kind_;
  int shots_;
};

inline constexpr std::string_view kPlaceholder = "{text}";

struct PromptBundle {
  Task task;
  Strategy strategy;
  std::vector<DialogueTurn> turns;
  std::string target_text;

  friend bool operator==(const PromptBundle&, const PromptBundle&) = default;
};

}  // namespace pcot::prompt
