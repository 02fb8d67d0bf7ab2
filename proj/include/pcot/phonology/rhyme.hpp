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

#include <set>
#include <string>
#include <string_view>

#include "pcot/error.hpp"
#include "pcot/phonology/lexicon.hpp"
#include "pcot/phonology/rhyme_key.hpp"
#include "pcot/util/text.hpp"

namespace pcot::phonology {

struct RhymeGoldSet {
  std::string target;
  std::set<std::string> members;  // case-folded, never contains target

  bool contains(std::string_view word) const { return members.count(text::ascii_lower(word)) > 0; }
};

/// Every headword sharing a rhyme key with any variant of `target`.
inline RhymeGoldSet build_gold_set(const PronunciationLexicon& lexicon, std::string_view target) {
  const auto* variants = lexicon.find(target);
  if (!variants) throw ValidationError("rhyme target '" + std::string(target) + "' is not in the lexicon");

  RhymeGoldSet gold{text::ascii_lower(target), {}};
  for (const auto& pron : *variants) {
    if (vowel_count(pron) == 0) continue;
    for (const auto& word : lexicon.words_with_key(rhyme_key(pron))) gold.members.insert(word);
  }
  gold.members.erase(gold.target);
  return gold;
}

/// True when any variant pair of the two words shares a rhyme key.
inline bool words_rhyme(const PronunciationLexicon& lexicon, std::string_view a, std::string_view b) {
  const auto* va = lexicon.find(a);
  const auto* vb = lexicon.find(b);
  if (!va || !vb) return false;
  for (const auto& pa : *va) {
    if (vowel_count(pa) == 0) continue;
    const auto ka = rhyme_key(pa);
    for (const auto& pb : *vb) {
      if (vowel_count(pb) > 0 && rhyme_key(pb) == ka) return true;
    }
  }
  return false;
}

}  // namespace pcot::phonology
