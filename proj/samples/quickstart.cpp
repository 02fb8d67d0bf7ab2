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

// Builds a prompt, scores three hand-written replies and runs one U test.

#include <iostream>

#include "pcot/analysis/mann_whitney.hpp"
#include "pcot/eval/record.hpp"
#include "pcot/phonology/rhyme.hpp"
#include "pcot/phonology/syllables.hpp"
#include "pcot/prompt/builder.hpp"

using namespace pcot;

int main() {
  const auto lex = phonology::load_lexicon_file(PCOT_FIXTURE_LEXICON);

  auto bundle = prompt::build_prompt(prompt::Task::g2p, prompt::Strategy::pcot(3), "basement");
  std::cout << "P-CoT3 g2p prompt: " << bundle.turns.size() << " turns, final user turn:\n"
            << bundle.turns.back().content << "\n\n";
  std::cout << "template check violations: " << prompt::validate_template(bundle).violations().size() << "\n\n";

  eval::TaskInstance rhyme{prompt::Task::rhyme, "r1", "education", phonology::build_gold_set(lex, "education"),
                           eval::SubsetTag::common};
  auto r = eval::evaluate(rhyme, "Words that rhyme with education: circulation, occupation, reputation, population, reservation", "demo", "pcot5");
  std::cout << "rhyme 'education' score: " << r.score << "\n";

  eval::TaskInstance g2p{prompt::Task::g2p, "g1", "basement",
                         std::vector<phonology::IpaTranscription>{phonology::normalize_ipa("beɪsmənt")},
                         eval::SubsetTag::high};
  std::cout << "g2p 'basement' score: " << eval::evaluate(g2p, "The answer is /beɪsmənt/.", "demo", "pcot5").score << "\n";

  const std::string sentence = "To top it all off, I miss my stunner.";
  auto count = phonology::count_syllables_sentence(lex, sentence);
  eval::TaskInstance syl{prompt::Task::syllable, "s1", sentence, eval::SyllableGold{count.count, count.heuristic},
                         eval::SubsetTag::none};
  std::cout << "syllable gold " << count.count << ", reply '10' scores "
            << eval::evaluate(syl, "10", "demo", "pcot5").score << "\n\n";

  auto test = analysis::mann_whitney_u({0.2, 0.4, 0.4, 0.6}, {0.6, 0.8, 1.0, 1.0});
  std::cout << "Mann-Whitney U = " << test.u_statistic << ", p = " << test.p_value << " ("
            << analysis::to_string(test.method) << ")\n";
}
