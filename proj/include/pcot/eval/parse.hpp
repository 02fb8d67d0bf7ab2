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
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "pcot/phonology/ipa.hpp"
#include "pcot/util/text.hpp"

namespace pcot::eval {

/// Parser outcome: a value, or an error marker describing why none was found.
template <class T>
struct Parsed {
  std::optional<T> value;
  std::string error;

  bool ok() const { return value.has_value(); }
  static Parsed success(T v) { return {std::move(v), {}}; }
  static Parsed failure(std::string why) { return {std::nullopt, std::move(why)}; }
};

inline constexpr std::size_t kRequestedRhymes = 5;

namespace detail {

inline bool is_quote(char32_t c) {
  return c == U'\'' || c == U'"' || c == U'‘' || c == U'’' || c == U'“' || c == U'”' || c == U'*' || c == U'`';
}

/// Lowercased code points with typographic quotes kept, for cue matching.
inline std::u32string fold(std::string_view s) {
  auto cps = text::utf8_decode(s);
  for (auto& c : cps)
    if (c >= 'A' && c <= 'Z') c = c - 'A' + 'a';
  return cps;
}

/// Candidate word from one list item, or empty when the item is not a single word.
inline std::string list_item_word(std::string_view item) {
  std::string s(text::trim(item));
  if (auto colon = s.rfind(':'); colon != std::string::npos) s = s.substr(colon + 1);
  auto toks = text::split_whitespace(s);
  std::vector<std::string_view> words(toks.begin(), toks.end());
  // Drop list numbering ("1.", "2)") and a leading conjunction.
  if (!words.empty()) {
    auto w = words.front();
    bool numbering = !w.empty() && std::all_of(w.begin(), w.end(), [](char c) {
      return (c >= '0' && c <= '9') || c == '.' || c == ')' || c == '-' || c == '*' || c == '#';
    });
    if (numbering) words.erase(words.begin());
  }
  if (words.size() == 2 && (text::ascii_lower(words[0]) == "and" || text::ascii_lower(words[0]) == "or"))
    words.erase(words.begin());
  if (words.size() != 1) return {};
  std::string w = text::normalize_word_token(words[0]);
  if (w.empty()) return {};
  for (char32_t c : text::utf8_decode(w))
    if (!text::is_letter(c) && c != U'\'' && c != U'-') return {};
  return w;
}

inline std::vector<std::string> finalize_candidates(const std::vector<std::string>& raw, std::string_view target) {
  const std::string t = text::normalize_word_token(target);
  std::vector<std::string> out;
  for (const auto& w : raw) {
    if (w.empty() || w == t || std::find(out.begin(), out.end(), w) != out.end()) continue;
    out.push_back(w);
    if (out.size() == kRequestedRhymes) break;
  }
  return out;
}

/// Byte offset just past the last "rhyme with <target>:" cue, if any.
inline std::optional<std::size_t> find_rhyme_cue(std::string_view raw, std::string_view target) {
  const std::u32string hay = fold(raw);
  const std::u32string cue = U"rhyme with";
  const std::u32string tgt = fold(text::normalize_word_token(target));
  if (tgt.empty()) return std::nullopt;
  std::optional<std::size_t> best_cp;
  for (std::size_t pos = hay.find(cue); pos != std::u32string::npos; pos = hay.find(cue, pos + 1)) {
    std::size_t i = pos + cue.size();
    while (i < hay.size() && (hay[i] == U' ' || is_quote(hay[i]))) ++i;
    if (hay.compare(i, tgt.size(), tgt) != 0) continue;
    i += tgt.size();
    while (i < hay.size() && (hay[i] == U' ' || hay[i] == U'.' || is_quote(hay[i]))) ++i;
    if (i < hay.size() && hay[i] == U':') best_cp = i + 1;
  }
  if (!best_cp) return std::nullopt;
  return text::utf8_encode(hay.substr(0, *best_cp)).size();
}

inline std::vector<std::string> lines_of(std::string_view s) {
  std::vector<std::string> out;
  for (auto l : text::split(s, '\n')) out.emplace_back(l);
  return out;
}

/// Last run of >= 2 consecutive single-word comma-separated items in one line.
inline std::optional<std::vector<std::string>> last_comma_run(std::string_view raw) {
  auto lines = lines_of(raw);
  for (auto it = lines.rbegin(); it != lines.rend(); ++it) {
    auto items = text::split(*it, ',');
    if (items.size() < 2) continue;
    std::optional<std::vector<std::string>> best;
    std::vector<std::string> run;
    auto close = [&] {
      if (run.size() >= 2) best = run;
      run.clear();
    };
    for (auto item : items) {
      auto w = list_item_word(item);
      if (w.empty()) close();
      else run.push_back(w);
    }
    close();
    if (best) return best;
  }
  return std::nullopt;
}

/// Last block of >= 2 consecutive lines that are single-word list entries.
inline std::optional<std::vector<std::string>> last_line_list(std::string_view raw) {
  auto lines = lines_of(raw);
  std::optional<std::vector<std::string>> best;
  std::vector<std::string> run;
  auto close = [&] {
    if (run.size() >= 2) best = run;
    run.clear();
  };
  for (const auto& l : lines) {
    if (text::trim(l).empty()) continue;
    auto w = list_item_word(l);
    if (w.empty()) close();
    else run.push_back(w);
  }
  close();
  return best;
}

}  // namespace detail

/// Up to five rhyme candidates: case-folded, deduplicated, target removed.
inline Parsed<std::vector<std::string>> parse_rhyme_response(std::string_view raw_in, std::string_view target) {
  try {
    // Offsets below index the re-encoded text (invalid bytes become U+FFFD).
    const std::string clean = text::utf8_encode(text::utf8_decode(raw_in));
    const std::string_view raw = clean;
    if (auto cue = detail::find_rhyme_cue(raw, target)) {
      std::string_view rest = raw.substr(*cue);
      auto nl = rest.find('\n');
      std::string_view first_line = text::trim(rest.substr(0, nl));
      std::vector<std::string> words;
      if (!first_line.empty()) {
        for (auto item : text::split(first_line, ',')) {
          auto w = detail::list_item_word(item);
          if (!w.empty()) words.push_back(w);
        }
      } else if (auto block = detail::last_line_list(rest)) {
        words = *block;
      }
      if (!words.empty()) return Parsed<std::vector<std::string>>::success(detail::finalize_candidates(words, target));
    }
    if (auto run = detail::last_comma_run(raw))
      return Parsed<std::vector<std::string>>::success(detail::finalize_candidates(*run, target));
    if (auto block = detail::last_line_list(raw))
      return Parsed<std::vector<std::string>>::success(detail::finalize_candidates(*block, target));
    return Parsed<std::vector<std::string>>::failure("no candidate list found");
  } catch (const std::exception& e) {
    return Parsed<std::vector<std::string>>::failure(std::string("rhyme parser error: ") + e.what());
  }
}

namespace detail {

inline bool is_ipa_char(char32_t c) {
  return (c >= 0x0250 && c <= 0x02FF) || c == U'æ' || c == U'ð' || c == U'θ' || c == U'ŋ' || c == U'ç' ||
         c == U'ø' || c == U'œ' || c == U'β' || c == U'χ';
}

inline bool has_ipa_char(std::u32string_view s) { return std::any_of(s.begin(), s.end(), is_ipa_char); }

inline bool has_letter(std::u32string_view s) {
  return std::any_of(s.begin(), s.end(), [](char32_t c) { return text::is_letter(c) || is_ipa_char(c); });
}

/// Content of the delimited span ending latest in the text: /.../ or [...].
inline std::optional<std::u32string> last_delimited_span(const std::u32string& s) {
  std::optional<std::u32string> best;
  std::size_t best_end = 0;
  auto consider = [&](std::size_t open, std::size_t close) {
    auto inner = s.substr(open + 1, close - open - 1);
    if (inner.empty() || inner.find(U'\n') != std::u32string::npos || !has_letter(inner)) return;
    if (!best || close >= best_end) {
      best = inner;
      best_end = close;
    }
  };
  std::optional<std::size_t> open;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] == U'\n') open.reset();
    if (s[i] != U'/') continue;
    if (open) {
      consider(*open, i);
      open.reset();
    } else {
      open = i;
    }
  }
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] != U'[') continue;
    auto j = s.find(U']', i + 1);
    if (j == std::u32string::npos) break;
    consider(i, j);
    i = j;
  }
  return best;
}

}  // namespace detail

inline Parsed<phonology::IpaTranscription> parse_g2p_response(std::string_view raw,
                                                            phonology::IpaNormalizeOptions opts = {}) {
  using P = Parsed<phonology::IpaTranscription>;
  try {
    const std::u32string cps = text::utf8_decode(raw);
    std::optional<std::u32string> span = detail::last_delimited_span(cps);
    if (!span) {
      std::u32string tok, last;
      auto flush = [&] {
        if (detail::has_ipa_char(tok)) last = tok;
        tok.clear();
      };
      for (char32_t c : cps) {
        if (c == U' ' || c == U'\t' || c == U'\n' || c == U'\r') flush();
        else tok.push_back(c);
      }
      flush();
      if (!last.empty()) {
        // Drop sentence punctuation around a bare token.
        while (!last.empty() && (last.back() == U'.' || last.back() == U',' || detail::is_quote(last.back()))) last.pop_back();
        while (!last.empty() && detail::is_quote(last.front())) last.erase(last.begin());
        span = last;
      }
    }
    if (!span) return P::failure("no IPA span found");
    auto ipa = phonology::normalize_ipa(text::utf8_encode(*span), opts);
    if (ipa.text.empty()) return P::failure("IPA span is empty after normalization");
    return P::success(std::move(ipa));
  } catch (const std::exception& e) {
    return P::failure(std::string("g2p parser error: ") + e.what());
  }
}

/// Last standalone run of ASCII digits (not glued to letters or other digits).
inline Parsed<long long> parse_syllable_response(std::string_view raw) {
  using P = Parsed<long long>;
  try {
    const std::u32string cps = text::utf8_decode(raw);
    auto is_digit = [](char32_t c) { return c >= U'0' && c <= U'9'; };
    std::optional<long long> last;
    for (std::size_t i = 0; i < cps.size();) {
      if (!is_digit(cps[i])) {
        ++i;
        continue;
      }
      std::size_t j = i;
      while (j < cps.size() && is_digit(cps[j])) ++j;
      bool glued = (i > 0 && text::is_letter(cps[i - 1])) || (j < cps.size() && text::is_letter(cps[j]));
      if (!glued && j - i <= 18) {
        long long v = 0;
        for (std::size_t k = i; k < j; ++k) v = v * 10 + (cps[k] - U'0');
        last = v;
      }
      i = j;
    }
    if (!last) return P::failure("no integer in response");
    return P::success(*last);
  } catch (const std::exception& e) {
    return P::failure(std::string("syllable parser error: ") + e.what());
  }
}

}  // namespace pcot::eval
