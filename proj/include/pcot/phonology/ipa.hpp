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
#include <stdexcept>
#include <string>
#include <string_view>
#include <unicode/normalizer2.h>
#include <unicode/unistr.h>
#include <vector>

#include "pcot/error.hpp"
#include "pcot/phonology/arpabet.hpp"
#include "pcot/util/text.hpp"

namespace pcot::phonology {

inline constexpr char32_t kPrimaryStress = U'ˈ';    // U+02C8
inline constexpr char32_t kSecondaryStress = U'ˌ';  // U+02CC
inline constexpr char32_t kLengthMark = U'ː';       // U+02D0
inline constexpr char32_t kHalfLength = U'ˑ';       // U+02D1

/// Canonical IPA text: no delimiters, no whitespace, NFC-composed.
struct IpaTranscription {
  std::string text;

  friend bool operator==(const IpaTranscription&, const IpaTranscription&) = default;
};

struct IpaNormalizeOptions {
  bool strip_stress = false;  // drop ˈ ˌ
  bool strip_length = false;  // drop ː ˑ
  bool strip_syllable_breaks = false;  // drop '.'

  static constexpr IpaNormalizeOptions strict() { return {}; }
  static constexpr IpaNormalizeOptions lenient() { return {true, true, true}; }
};

namespace detail {

inline std::string nfc(const std::string& utf8) {
  UErrorCode status = U_ZERO_ERROR;
  const icu::Normalizer2* norm = icu::Normalizer2::getNFCInstance(status);
  if (U_FAILURE(status)) throw std::runtime_error("ICU NFC normalizer unavailable");
  icu::UnicodeString composed = norm->normalize(icu::UnicodeString::fromUTF8(utf8), status);
  if (U_FAILURE(status)) return utf8;
  std::string out;
  composed.toUTF8String(out);
  return out;
}

}  // namespace detail

namespace detail {

inline std::string normalize_pass(std::string_view raw, IpaNormalizeOptions opts) {
  std::u32string kept;
  for (char32_t c : text::utf8_decode(raw)) {
    if (c == U'/' || c == U'[' || c == U']' || text::is_ascii_space(c) || c == 0xA0) continue;
    if (c == 0x0361 || c == 0x035C) continue;  // tie bars
    kept.push_back(c);
  }
  const std::u32string composed = text::utf8_decode(nfc(text::utf8_encode(kept)));

  std::u32string out;
  out.reserve(composed.size());
  for (std::size_t i = 0; i < composed.size(); ++i) {
    char32_t c = composed[i];
    const bool rhotic_next = i + 1 < composed.size() && composed[i + 1] == 0x02DE;
    if (rhotic_next && (c == U'ə' || c == U'ɜ')) {
      out.push_back(c == U'ə' ? U'ɚ' : U'ɝ');
      ++i;
      continue;
    }
    switch (c) {
      case U':':
      case 0xA789:
        c = kLengthMark;
        break;
      case U'g':
        c = U'ɡ';
        break;
      case U'\'':
      case 0x2032:
      case 0x02B9:
        c = kPrimaryStress;
        break;
      default:
        break;
    }
    if (opts.strip_stress && (c == kPrimaryStress || c == kSecondaryStress)) continue;
    if (opts.strip_length && (c == kLengthMark || c == kHalfLength)) continue;
    if (opts.strip_syllable_breaks && c == U'.') continue;
    out.push_back(c);
  }
  return nfc(text::utf8_encode(out));
}

}  // namespace detail

/// Strips '/', '[', ']' and whitespace, composes to NFC and folds look-alike
/// variants: ':' and U+A789 become ː, ASCII g becomes ɡ, straight apostrophe and
/// prime become ˈ, ə˞/ɜ˞ become ɚ/ɝ, tie bars are removed.
///
/// Dropping marks can expose new composable or rhotic pairs, so the pass is
/// repeated until the text stops changing; this makes the result idempotent.
inline IpaTranscription normalize_ipa(std::string_view raw, IpaNormalizeOptions opts = {}) {
  std::string cur = detail::normalize_pass(raw, opts);
  for (int guard = 0; guard < 8; ++guard) {
    std::string next = detail::normalize_pass(cur, opts);
    if (next == cur) break;
    cur = std::move(next);
  }
  return {std::move(cur)};
}

// General American ARPAbet -> IPA. AH and ER reduce to ə and ɚ when unstressed.
inline std::u32string_view ipa_for(const Phoneme& p) {
  const bool reduced = p.stress() && *p.stress() == 0;
  switch (p.symbol()) {
    case Arpabet::AA: return U"ɑ";
    case Arpabet::AE: return U"æ";
    case Arpabet::AH: return reduced ? U"ə" : U"ʌ";
    case Arpabet::AO: return U"ɔ";
    case Arpabet::AW: return U"aʊ";
    case Arpabet::AY: return U"aɪ";
    case Arpabet::EH: return U"ɛ";
    case Arpabet::ER: return reduced ? U"ɚ" : U"ɝ";
    case Arpabet::EY: return U"eɪ";
    case Arpabet::IH: return U"ɪ";
    case Arpabet::IY: return U"i";
    case Arpabet::OW: return U"oʊ";
    case Arpabet::OY: return U"ɔɪ";
    case Arpabet::UH: return U"ʊ";
    case Arpabet::UW: return U"u";
    case Arpabet::B: return U"b";
    case Arpabet::CH: return U"tʃ";
    case Arpabet::D: return U"d";
    case Arpabet::DH: return U"ð";
    case Arpabet::F: return U"f";
    case Arpabet::G: return U"ɡ";
    case Arpabet::HH: return U"h";
    case Arpabet::JH: return U"dʒ";
    case Arpabet::K: return U"k";
    case Arpabet::L: return U"l";
    case Arpabet::M: return U"m";
    case Arpabet::N: return U"n";
    case Arpabet::NG: return U"ŋ";
    case Arpabet::P: return U"p";
    case Arpabet::R: return U"ɹ";
    case Arpabet::S: return U"s";
    case Arpabet::SH: return U"ʃ";
    case Arpabet::T: return U"t";
    case Arpabet::TH: return U"θ";
    case Arpabet::V: return U"v";
    case Arpabet::W: return U"w";
    case Arpabet::Y: return U"j";
    case Arpabet::Z: return U"z";
    case Arpabet::ZH: return U"ʒ";
  }
  return U"";
}

/// Every code point arpabet_to_ipa can emit, stress marks included.
inline std::u32string ipa_inventory() {
  std::u32string all{kPrimaryStress, kSecondaryStress};
  for (std::size_t i = 0; i < kArpabetCount; ++i) {
    const auto sym = static_cast<Arpabet>(i);
    if (is_vowel(sym)) {
      for (int s = 0; s <= 1; ++s) all += ipa_for(Phoneme::vowel(sym, s));
    } else {
      all += ipa_for(Phoneme::consonant(sym));
    }
  }
  return all;
}

namespace detail {

using A = Arpabet;

// Legal General American onsets beyond single consonants (NG never begins one).
inline bool legal_onset(const std::vector<Arpabet>& c) {
  if (c.empty()) return true;
  if (c.size() == 1) return c[0] != A::NG;
  static const std::vector<std::vector<Arpabet>> kClusters = {
      {A::P, A::R},  {A::P, A::L},  {A::B, A::R},  {A::B, A::L},  {A::T, A::R},  {A::D, A::R},
      {A::K, A::R},  {A::K, A::L},  {A::G, A::R},  {A::G, A::L},  {A::F, A::R},  {A::F, A::L},
      {A::TH, A::R}, {A::SH, A::R}, {A::P, A::Y},  {A::B, A::Y},  {A::K, A::Y},  {A::G, A::Y},
      {A::M, A::Y},  {A::F, A::Y},  {A::V, A::Y},  {A::HH, A::Y}, {A::T, A::W},  {A::D, A::W},
      {A::K, A::W},  {A::G, A::W},  {A::S, A::W},  {A::TH, A::W}, {A::S, A::P},  {A::S, A::T},
      {A::S, A::K},  {A::S, A::M},  {A::S, A::N},  {A::S, A::L},  {A::S, A::F},
      {A::S, A::P, A::R}, {A::S, A::P, A::L}, {A::S, A::T, A::R}, {A::S, A::K, A::R},
      {A::S, A::K, A::L}, {A::S, A::K, A::W}, {A::S, A::P, A::Y}, {A::S, A::K, A::Y},
  };
  for (const auto& k : kClusters) {
    if (k == c) return true;
  }
  return false;
}

}  // namespace detail

/// Per-phone substitution with ˈ/ˌ inserted before the onset of each stressed
/// syllable (maximal legal onset). `mark_stress = false` yields the bare form.
inline IpaTranscription arpabet_to_ipa(const PhonemeSequence& pron, bool mark_stress = true) {
  std::vector<std::size_t> mark_at(pron.size() + 1, 0);  // 0 none, 1 primary, 2 secondary
  if (mark_stress) {
    std::size_t prev_vowel = pron.size();
    for (std::size_t i = 0; i < pron.size(); ++i) {
      if (!pron[i].is_vowel()) continue;
      if (pron[i].is_stressed()) {
        std::size_t onset = i;
        if (prev_vowel == pron.size()) {
          onset = 0;
        } else {
          std::size_t lo = prev_vowel + 1;
          for (std::size_t s = lo; s < i; ++s) {
            std::vector<Arpabet> cluster;
            for (std::size_t k = s; k < i; ++k) cluster.push_back(pron[k].symbol());
            if (detail::legal_onset(cluster)) {
              onset = s;
              break;
            }
          }
        }
        mark_at[onset] = static_cast<std::size_t>(*pron[i].stress());
      }
      prev_vowel = i;
    }
  }
  std::u32string out;
  for (std::size_t i = 0; i < pron.size(); ++i) {
    if (mark_at[i] == 1) out.push_back(kPrimaryStress);
    if (mark_at[i] == 2) out.push_back(kSecondaryStress);
    out += ipa_for(pron[i]);
  }
  return normalize_ipa(text::utf8_encode(out));
}

}  // namespace pcot::phonology
