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
#include <vector>

#include "pcot/eval/parse.hpp"
#include "pcot/phonology/ipa.hpp"
#include "pcot/phonology/rhyme.hpp"

namespace pcot::eval {

/// Success-rate denominator: the requested count (default) or the number generated.
enum class SrDenominator { requested, generated };

inline double score_rhyme(const std::vector<std::string>& candidates, const phonology::RhymeGoldSet& gold,
                          SrDenominator denom = SrDenominator::requested) {
  std::set<std::string> seen;
  std::size_t considered = 0, hits = 0;
  const std::string target = text::normalize_word_token(gold.target);
  for (const auto& c : candidates) {
    std::string w = text::normalize_word_token(c);
    if (w.empty() || w == target || !seen.insert(w).second) continue;
    if (considered == kRequestedRhymes) break;
    ++considered;
    hits += gold.members.count(w);
  }
  if (considered == 0) return 0.0;
  const double d = denom == SrDenominator::requested ? static_cast<double>(kRequestedRhymes) : static_cast<double>(considered);
  return static_cast<double>(hits) / d;
}

inline int score_exact_match(const phonology::IpaTranscription& pred,
                             const std::vector<phonology::IpaTranscription>& gold_variants,
                             phonology::IpaNormalizeOptions opts = {}) {
  const auto p = phonology::normalize_ipa(pred.text, opts);
  for (const auto& g : gold_variants)
    if (phonology::normalize_ipa(g.text, opts) == p) return 1;
  return 0;
}

inline int score_exact_match(long long pred, long long gold) { return pred == gold ? 1 : 0; }

}  // namespace pcot::eval
