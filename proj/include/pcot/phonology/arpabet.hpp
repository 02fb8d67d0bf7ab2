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

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "pcot/error.hpp"
#include "pcot/util/text.hpp"

namespace pcot::phonology {

// The closed 39-symbol ARPAbet inventory: 15 vowels first, then 24 consonants.
enum class Arpabet : std::uint8_t {
  AA, AE, AH, AO, AW, AY, EH, ER, EY, IH, IY, OW, OY, UH, UW,
  B, CH, D, DH, F, G, HH, JH, K, L, M, N, NG, P, R, S, SH, T, TH, V, W, Y, Z, ZH,
};

inline constexpr std::size_t kArpabetCount = 39;
inline constexpr std::size_t kVowelCount = 15;

inline constexpr std::array<std::string_view, kArpabetCount> kArpabetNames = {
    "AA", "AE", "AH", "AO", "AW", "AY", "EH", "ER", "EY", "IH", "IY", "OW", "OY", "UH", "UW",
    "B",  "CH", "D",  "DH", "F",  "G",  "HH", "JH", "K",  "L",  "M",  "N",  "NG", "P",
    "R",  "S",  "SH", "T",  "TH", "V",  "W",  "Y",  "Z",  "ZH",
};

constexpr bool is_vowel(Arpabet s) { return static_cast<std::size_t>(s) < kVowelCount; }

constexpr std::string_view name(Arpabet s) { return kArpabetNames[static_cast<std::size_t>(s)]; }

inline std::optional<Arpabet> arpabet_from_name(std::string_view s) {
  for (std::size_t i = 0; i < kArpabetCount; ++i) {
    if (kArpabetNames[i] == s) return static_cast<Arpabet>(i);
  }
  return std::nullopt;
}

/// One phone. Vowels always carry a stress digit (0, 1 or 2); consonants never do.
class Phoneme {
 public:
  static Phoneme consonant(Arpabet s) {
    if (phonology::is_vowel(s)) throw ValidationError("vowel " + std::string(name(s)) + " requires a stress digit");
    return Phoneme(s, std::nullopt);
  }

  static Phoneme vowel(Arpabet s, int stress) {
    if (!phonology::is_vowel(s)) throw ValidationError("consonant " + std::string(name(s)) + " cannot carry stress");
    if (stress < 0 || stress > 2) throw ValidationError("stress digit must be 0, 1 or 2");
    return Phoneme(s, static_cast<std::uint8_t>(stress));
  }

  /// Parses "AH0", "T", ... Accepts lowercase input.
  static Phoneme parse(std::string_view token) {
    std::string up = text::ascii_upper(token);
    std::optional<int> digit;
    if (!up.empty() && text::is_ascii_digit(static_cast<unsigned char>(up.back()))) {
      digit = up.back() - '0';
      up.pop_back();
    }
    auto sym = arpabet_from_name(up);
    if (!sym) throw ValidationError("unknown phoneme symbol '" + std::string(token) + "'");
    if (phonology::is_vowel(*sym)) {
      if (!digit) throw ValidationError("vowel '" + std::string(token) + "' lacks a stress digit");
      return vowel(*sym, *digit);
    }
    if (digit) throw ValidationError("consonant '" + std::string(token) + "' carries a stress digit");
    return consonant(*sym);
  }

  Arpabet symbol() const noexcept { return symbol_; }
  std::optional<int> stress() const noexcept {
    if (!stress_) return std::nullopt;
    return static_cast<int>(*stress_);
  }
  bool is_vowel() const noexcept { return phonology::is_vowel(symbol_); }
  bool is_stressed() const noexcept { return stress_ && *stress_ > 0; }

  std::string to_string() const {
    std::string out(name(symbol_));
    if (stress_) out.push_back(static_cast<char>('0' + *stress_));
    return out;
  }

  friend bool operator==(const Phoneme&, const Phoneme&) = default;
  friend auto operator<=>(const Phoneme&, const Phoneme&) = default;

 private:
  Phoneme(Arpabet s, std::optional<std::uint8_t> stress) : symbol_(s), stress_(stress) {}

  Arpabet symbol_;
  std::optional<std::uint8_t> stress_;
};

using PhonemeSequence = std::vector<Phoneme>;

inline PhonemeSequence parse_phonemes(std::string_view text) {
  PhonemeSequence out;
  for (auto tok : text::split_whitespace(text)) out.push_back(Phoneme::parse(tok));
  return out;
}

inline std::string to_string(const PhonemeSequence& seq) {
  std::string out;
  for (const auto& p : seq) {
    if (!out.empty()) out.push_back(' ');
    out += p.to_string();
  }
  return out;
}

inline std::size_t vowel_count(const PhonemeSequence& seq) {
  std::size_t n = 0;
  for (const auto& p : seq) n += p.is_vowel() ? 1 : 0;
  return n;
}

}  // namespace pcot::phonology
