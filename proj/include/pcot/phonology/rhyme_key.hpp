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

#include "pcot/error.hpp"
#include "pcot/phonology/arpabet.hpp"

namespace pcot::phonology {

/// Stress-free phone suffix starting at the last stressed vowel. Two words rhyme
/// iff some pair of their pronunciations yields equal keys.
class RhymeKey {
 public:
  explicit RhymeKey(std::vector<Arpabet> phones) : phones_(std::move(phones)) {
    if (phones_.empty() || !is_vowel(phones_.front())) {
      throw ValidationError("rhyme key must begin with a vowel");
    }
  }

  const std::vector<Arpabet>& phones() const noexcept { return phones_; }

  std::string str() const {
    std::string out;
    for (auto p : phones_) {
      if (!out.empty()) out.push_back(' ');
      out += name(p);
    }
    return out;
  }

  friend bool operator==(const RhymeKey&, const RhymeKey&) = default;
  friend auto operator<=>(const RhymeKey&, const RhymeKey&) = default;

 private:
  std::vector<Arpabet> phones_;
};

/// Suffix from the last vowel with stress 1 or 2, else from the last vowel.
inline RhymeKey rhyme_key(const PhonemeSequence& pron) {
  std::size_t start = pron.size();
  std::size_t last_vowel = pron.size();
  for (std::size_t i = pron.size(); i-- > 0;) {
    if (!pron[i].is_vowel()) continue;
    if (last_vowel == pron.size()) last_vowel = i;
    if (pron[i].is_stressed()) {
      start = i;
      break;
    }
  }
  if (last_vowel == pron.size()) throw ValidationError("pronunciation has no vowel: " + to_string(pron));
  if (start == pron.size()) start = last_vowel;

  std::vector<Arpabet> phones;
  phones.reserve(pron.size() - start);
  for (std::size_t i = start; i < pron.size(); ++i) phones.push_back(pron[i].symbol());
  return RhymeKey(std::move(phones));
}

}  // namespace pcot::phonology
