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
#include <string_view>
#include <vector>

#include "pcot/error.hpp"
#include "pcot/phonology/lexicon.hpp"
#include "pcot/util/text.hpp"

namespace pcot::phonology {

struct SyllableCount {
  unsigned count = 0;
  bool heuristic = false;  // at least one token was absent from the lexicon

  friend bool operator==(const SyllableCount&, const SyllableCount&) = default;
};

/// Orthographic fallback for out-of-lexicon tokens: maximal runs of a/e/i/o/u/y,
/// minus one for a final silent 'e' after a consonant, never below one.
inline unsigned heuristic_syllables(std::string_view token) {
  const std::string w = text::ascii_lower(token);
  auto is_v = [](char c) {
    return c == 'a' || c == 'e' || c == 'i' || c == 'o' || c == 'u' || c == 'y';
  };
  unsigned groups = 0;
  bool in_group = false;
  for (char c : w) {
    const bool v = is_v(c);
    if (v && !in_group) ++groups;
    in_group = v;
  }
  if (w.size() >= 2 && w.back() == 'e' && text::is_ascii_alpha(static_cast<unsigned char>(w[w.size() - 2])) &&
      !is_v(w[w.size() - 2]) && groups > 0) {
    --groups;
  }
  return groups == 0 ? 1u : groups;
}

/// Splits on whitespace and strips edge punctuation; tokens with no letter or digit
/// are dropped.
inline std::vector<std::string> tokenize_words(std::string_view sentence) {
  std::vector<std::string> out;
  for (auto raw : text::split_whitespace(sentence)) {
    auto tok = text::normalize_word_token(raw);
    if (!tok.empty()) out.push_back(std::move(tok));
  }
  return out;
}

inline SyllableCount count_syllables_word(const PronunciationLexicon& lexicon, std::string_view word) {
  const std::string tok = text::normalize_word_token(word);
  if (tok.empty()) throw ValidationError("empty token");
  if (const auto* variants = lexicon.find(tok)) {
    return {static_cast<unsigned>(vowel_count(variants->front())), false};
  }
  return {heuristic_syllables(tok), true};
}

inline SyllableCount count_syllables_sentence(const PronunciationLexicon& lexicon, std::string_view sentence) {
  const auto tokens = tokenize_words(sentence);
  bool any_alpha = false;
  for (const auto& t : tokens) {
    for (char32_t c : text::utf8_decode(t)) any_alpha = any_alpha || text::is_letter(c);
  }
  if (!any_alpha) throw ValidationError("sentence has no alphabetic tokens");

  SyllableCount total;
  for (const auto& t : tokens) {
    const auto c = count_syllables_word(lexicon, t);
    total.count += c.count;
    total.heuristic = total.heuristic || c.heuristic;
  }
  return total;
}

}  // namespace pcot::phonology
