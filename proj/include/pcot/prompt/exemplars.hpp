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

#include <string>
#include <vector>

#include "pcot/prompt/types.hpp"

namespace pcot::prompt {

struct Exemplar {
  std::string input;
  std::string output;
};

/// Fixed worked-example bank shared by few-shot and P-CoT prompts. 3-shot uses the first three.
inline const std::vector<Exemplar>& few_shot_exemplars(Task task) {
  static const std::vector<Exemplar> rhyme = {
      {"information", "isolation, operation, conversation, corporation, demonstration"},
      {"available", "distrainable, explainable, restrainable, retainable, retrainable"},
      {"transport", "passport, escort, report, resort, retort"},
      {"interesting", "beginning, interrupting, diminishing, investing, referencing"},
      {"technology", "eternity, innocuity, unity, activity, amusingly"},
  };
  static const std::vector<Exemplar> g2p = {
      {"apparently", "/əpˈɛɹəntli/"},
      {"calorie", "/ˈkælɚi/"},
      {"freshman", "/ˈfɹɛʃmən/"},
      {"breeze", "/ˈbɹiːz/"},
      {"invite", "/ɪnˈvaɪt/"},
  };
  static const std::vector<Exemplar> syllable = {
      {"Grace has resigned herself to simply completing the upbringing of her teenage daughter.", "22"},
      {"This story is about a young girl's redemption in a small town.", "16"},
      {"The one thing that hasn't happened is a proposal.", "13"},
      {"She meets him randomly in the woods at his family's cabin.", "16"},
      {"Just a simple blacksmith’s assistant, he didn’t have much to offer, but his love.", "20"},
  };
  switch (task) {
    case Task::rhyme: return rhyme;
    case Task::g2p: return g2p;
    case Task::syllable: return syllable;
  }
  return rhyme;
}

}  // namespace pcot::prompt
