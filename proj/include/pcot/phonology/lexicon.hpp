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
#include <fstream>
#include <istream>
#include <map>
#include <memory>
#include <sstream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "pcot/error.hpp"
#include "pcot/phonology/arpabet.hpp"
#include "pcot/phonology/rhyme_key.hpp"
#include "pcot/util/text.hpp"

namespace pcot::phonology {

/// Case-insensitive word -> pronunciation variants, in file order. Immutable once
/// loaded, so a single instance can be shared by any number of worker threads.
class PronunciationLexicon {
 public:
  using Variants = std::vector<PhonemeSequence>;

  PronunciationLexicon(std::map<std::string, Variants> entries, std::string source_id)
      : entries_(std::move(entries)), source_id_(std::move(source_id)) {
    if (entries_.empty()) throw ValidationError("lexicon '" + source_id_ + "' has no entries");
    for (const auto& [word, variants] : entries_) {
      if (variants.empty()) throw ValidationError("lexicon entry '" + word + "' has no pronunciation");
      for (const auto& v : variants) {
        if (v.empty()) throw ValidationError("lexicon entry '" + word + "' has an empty pronunciation");
        if (vowel_count(v) == 0) continue;
        rhyme_index_[rhyme_key(v).str()].push_back(word);
      }
    }
    for (auto& [key, words] : rhyme_index_) {
      // entries_ iterates in sorted order, so only adjacent duplicates (same word,
      // several variants with one key) can occur.
      words.erase(std::unique(words.begin(), words.end()), words.end());
    }
  }

  const Variants* find(std::string_view word) const {
    auto it = entries_.find(text::ascii_lower(word));
    return it == entries_.end() ? nullptr : &it->second;
  }

  bool contains(std::string_view word) const { return find(word) != nullptr; }

  std::size_t size() const noexcept { return entries_.size(); }
  const std::string& source_id() const noexcept { return source_id_; }
  const std::map<std::string, Variants>& entries() const noexcept { return entries_; }

  /// Sorted headwords having at least one variant whose rhyme key equals `key`.
  const std::vector<std::string>& words_with_key(const RhymeKey& key) const {
    static const std::vector<std::string> kNone;
    auto it = rhyme_index_.find(key.str());
    return it == rhyme_index_.end() ? kNone : it->second;
  }

 private:
  std::map<std::string, Variants> entries_;
  std::string source_id_;
  std::unordered_map<std::string, std::vector<std::string>> rhyme_index_;
};

namespace detail {

inline std::string strip_variant_suffix(std::string_view head) {
  if (head.size() >= 3 && head.back() == ')') {
    auto open = head.rfind('(');
    if (open != std::string_view::npos && open > 0 && open + 2 < head.size()) {
      bool digits = true;
      for (std::size_t i = open + 1; i + 1 < head.size(); ++i) {
        digits = digits && text::is_ascii_digit(static_cast<unsigned char>(head[i]));
      }
      if (digits) return std::string(head.substr(0, open));
    }
  }
  return std::string(head);
}

}  // namespace detail

/// Parses CMU-dictionary text: ";;;" comment lines, "WORD  PH PH ..." entries with
/// any whitespace run as separator, "WORD(n)" variant headwords, and trailing
/// "# ..." annotations as found in the cmudict.dict distribution.
inline PronunciationLexicon load_lexicon(std::istream& in, const std::string& source_id) {
  std::map<std::string, PronunciationLexicon::Variants> entries;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::string_view view = line;
    if (view.starts_with(";;;")) continue;
    if (auto hash = view.find('#'); hash != std::string_view::npos) view = view.substr(0, hash);
    view = text::trim(view);
    if (view.empty()) continue;

    auto fields = text::split_whitespace(view);
    if (fields.size() < 2) throw FormatError(source_id, lineno, "expected 'WORD PH PH ...'");
    std::string word = text::ascii_lower(detail::strip_variant_suffix(fields[0]));
    if (word.empty()) throw FormatError(source_id, lineno, "empty headword");

    PhonemeSequence phones;
    phones.reserve(fields.size() - 1);
    for (std::size_t i = 1; i < fields.size(); ++i) {
      try {
        phones.push_back(Phoneme::parse(fields[i]));
      } catch (const ValidationError& e) {
        throw FormatError(source_id, lineno, e.what());
      }
    }
    entries[word].push_back(std::move(phones));
  }
  if (entries.empty()) throw ValidationError("lexicon '" + source_id + "' has no entries");
  return PronunciationLexicon(std::move(entries), source_id);
}

inline PronunciationLexicon load_lexicon_text(std::string_view content, const std::string& source_id) {
  std::istringstream in{std::string(content)};
  return load_lexicon(in, source_id);
}

inline PronunciationLexicon load_lexicon_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open lexicon '" + path + "'");
  return load_lexicon(in, path);
}

}  // namespace pcot::phonology
