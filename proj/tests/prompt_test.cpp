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

#include <gtest/gtest.h>

#include <random>
#include <regex>

#include <nlohmann/json.hpp>

#include "pcot/phonology/syllables.hpp"
#include "pcot/prompt/builder.hpp"
#include "test_support.hpp"

using namespace pcot;
using namespace pcot::prompt;
using pcot::testing::ScratchDir;

namespace {

const TemplateStore& store() {
  static const TemplateStore s = TemplateStore::load(pcot::testing::template_dir());
  return s;
}

std::vector<std::pair<Task, Strategy>> all_pairs() {
  std::vector<std::pair<Task, Strategy>> out;
  for (Task t : kAllTasks)
    for (const auto& s : Strategy::all()) out.emplace_back(t, s);
  return out;
}

std::string pair_name(Task t, const Strategy& s) { return std::string(to_string(t)) + "_" + s.id(); }

std::string render(const PromptBundle& b) {
  std::string out;
  for (const auto& t : b.turns) out += "[" + std::string(to_string(t.role)) + "]\n" + t.content + "\n\n";
  return out;
}

std::string sample_instance(Task t) {
  switch (t) {
    case Task::rhyme: return "education";
    case Task::g2p: return "basement";
    case Task::syllable: return "To top it all off, I miss my stunner.";
  }
  return "";
}

std::vector<Role> roles(const PromptBundle& b) {
  std::vector<Role> out;
  for (const auto& t : b.turns) out.push_back(t.role);
  return out;
}

}  // namespace

TEST(Strategy, KindShotsInvariant) {
  EXPECT_NO_THROW(Strategy::baseline());
  EXPECT_THROW(Strategy(Strategy::Kind::baseline, 3), ValidationError);
  EXPECT_THROW(Strategy::fewshot(1), ValidationError);
  EXPECT_THROW(Strategy::fewshot(0), ValidationError);
  EXPECT_THROW(Strategy::pcot(0), ValidationError);
  EXPECT_THROW(Strategy::pcot(4), ValidationError);
  for (int n : {1, 3, 5}) EXPECT_EQ(Strategy::pcot(n).shots(), n);
}

TEST(Strategy, ParseRoundTrip) {
  for (const auto& s : Strategy::all()) EXPECT_EQ(Strategy::parse(s.id()), s);
  EXPECT_THROW(Strategy::parse("fewshot1"), ValidationError);
  EXPECT_THROW(Strategy::parse("pcot"), ValidationError);
  EXPECT_EQ(Strategy::pcot(3).label(), "P-CoT3");
  EXPECT_EQ(Strategy::fewshot(5).label(), "5-Shot");
}

TEST(DialogueTurn, RejectsEmptyContent) {
  EXPECT_THROW(DialogueTurn(Role::user, ""), ValidationError);
  EXPECT_THROW(parse_role("teacher"), ValidationError);
}

TEST(Exemplars, Banks) {
  EXPECT_EQ(few_shot_exemplars(Task::g2p).at(2).input, "freshman");
  EXPECT_EQ(few_shot_exemplars(Task::rhyme).at(4).input, "technology");
  std::vector<int> sums;
  for (const auto& e : few_shot_exemplars(Task::syllable)) sums.push_back(std::stoi(e.output));
  EXPECT_EQ(sums, (std::vector<int>{22, 16, 13, 16, 20}));
}

TEST(Exemplars, SyllableSumsMatchOracle) {
  // The dialogue answers are fixed template values; this only checks the lexicon agrees with them.
  const auto& lex = pcot::testing::fixture_lexicon();
  for (const auto& e : few_shot_exemplars(Task::syllable))
    EXPECT_EQ(static_cast<int>(phonology::count_syllables_sentence(lex, e.input).count), std::stoi(e.output)) << e.input;
}

TEST(Exemplars, SyllableBreakdownsAddUp) {
  // Every "word (n), ..." turn in the syllable dialogues sums to the next numeric answer.
  std::regex paren(R"(\((\d+)\))");
  for (int n : {3, 5}) {
    const auto& turns = store().turns(Task::syllable, Strategy::pcot(n));
    int checked = 0;
    for (std::size_t i = 0; i + 2 < turns.size(); ++i) {
      if (turns[i].role != Role::user || turns[i].content.find(" (") == std::string::npos) continue;
      int sum = 0;
      for (std::sregex_iterator it(turns[i].content.begin(), turns[i].content.end(), paren), end; it != end; ++it)
        sum += std::stoi((*it)[1]);
      EXPECT_EQ(std::to_string(sum), turns[i + 2].content);
      ++checked;
    }
    EXPECT_EQ(checked, n);
  }
}

TEST(Exemplars, TemplatesCarryTheBank) {
  for (Task t : kAllTasks) {
    const auto& bank = few_shot_exemplars(t);
    for (int n : {3, 5}) {
      const auto& fs = store().turns(t, Strategy::fewshot(n)).back().content;
      for (int i = 0; i < 5; ++i) {
        bool present = fs.find(bank[i].input + " → " + bank[i].output + "\n") != std::string::npos;
        EXPECT_EQ(present, i < n) << pair_name(t, Strategy::fewshot(n)) << " #" << i;
      }
    }
  }
  const auto& r5 = store().turns(Task::rhyme, Strategy::pcot(5));
  for (const auto& e : few_shot_exemplars(Task::rhyme)) {
    std::string answer = "Here are some words that rhyme with ‘" + e.input + "’: " + e.output + ".";
    EXPECT_TRUE(std::any_of(r5.begin(), r5.end(), [&](const DialogueTurn& d) { return d.content == answer; })) << e.input;
  }
  const auto& g5 = store().turns(Task::g2p, Strategy::pcot(5));
  for (const auto& e : few_shot_exemplars(Task::g2p)) {
    std::string claim = "pronunciation of ‘" + e.input + "’ is " + e.output + ".";
    EXPECT_TRUE(std::any_of(g5.begin(), g5.end(), [&](const DialogueTurn& d) {
      return d.role == Role::assistant && d.content.find(claim) != std::string::npos;
    })) << e.input;
  }
}

TEST(BuildPrompt, SyllablePcot3TurnLayout) {
  auto b = build_prompt(store(), Task::syllable, Strategy::pcot(3), sample_instance(Task::syllable));
  ASSERT_EQ(b.turns.size(), 22u);
  EXPECT_EQ(b.turns[0].role, Role::system);
  EXPECT_EQ(b.turns[1].role, Role::user);
  EXPECT_EQ(b.turns[2].role, Role::assistant);
  for (std::size_t i = 3; i < 21; ++i) EXPECT_EQ(b.turns[i].role, (i % 2 == 1) ? Role::user : Role::assistant) << i;
  EXPECT_EQ(b.turns.back().role, Role::user);
}

TEST(BuildPrompt, TurnCountsPerStrategy) {
  // system + setup + per-exemplar exchange + final request
  auto count = [&](Task t, const Strategy& s) {
    return build_prompt(store(), t, s, sample_instance(t)).turns.size();
  };
  EXPECT_EQ(count(Task::syllable, Strategy::pcot(5)), 1u + 2 + 5 * 6 + 1);
  EXPECT_EQ(count(Task::syllable, Strategy::pcot(1)), 1u + 2 + 6 + 1);
  EXPECT_EQ(count(Task::rhyme, Strategy::pcot(3)), 1u + 2 + 3 * 4 + 1);
  EXPECT_EQ(count(Task::rhyme, Strategy::pcot(5)), 1u + 2 + 5 * 4 + 1);
  EXPECT_EQ(count(Task::rhyme, Strategy::pcot(1)), 2u);
  EXPECT_EQ(count(Task::g2p, Strategy::pcot(1)), 1u + 2 + 1);
  EXPECT_EQ(count(Task::g2p, Strategy::pcot(3)), 1u + 3 * 2 + 1);
  EXPECT_EQ(count(Task::g2p, Strategy::pcot(5)), 1u + 5 * 2 + 1);
  for (Task t : kAllTasks) {
    EXPECT_EQ(count(t, Strategy::baseline()), 2u);
    EXPECT_EQ(count(t, Strategy::fewshot(3)), 2u);
  }
}

TEST(BuildPrompt, RhymePcot1Wording) {
  auto b = build_prompt(store(), Task::rhyme, Strategy::pcot(1), "education");
  EXPECT_NE(b.turns.back().content.find("Give exactly 5 different words that rhyme with ‘education’"), std::string::npos);
  EXPECT_EQ(b.target_text, "education");
}

TEST(BuildPrompt, G2pFinalInstruction) {
  auto b = build_prompt(store(), Task::g2p, Strategy::pcot(3), "basement");
  const std::string tail = "Give me only its complete GAE phonemic transcription.";
  const auto& c = b.turns.back().content;
  ASSERT_GE(c.size(), tail.size());
  EXPECT_EQ(c.substr(c.size() - tail.size()), tail);
}

TEST(BuildPrompt, BaselineWording) {
  EXPECT_EQ(build_prompt(store(), Task::rhyme, Strategy::baseline(), "education").turns.back().content,
            "Give 5 words that rhyme with ‘education’.");
  EXPECT_EQ(build_prompt(store(), Task::g2p, Strategy::baseline(), "basement").turns.back().content,
            "Convert the given grapheme ‘basement’ into phoneme according to American English in IPA.");
  EXPECT_EQ(build_prompt(store(), Task::syllable, Strategy::baseline(), "To top it all off, I miss my stunner.")
                .turns.back().content,
            "Count the number of syllables in the sentence: \"To top it all off, I miss my stunner.\"");
}

TEST(BuildPrompt, RoleAssignment) {
  // Rhyme and syllable: the user turns supply the answers and the assistant confirms.
  // G2P: the user asks and the assistant supplies transcriptions.
  auto syl = build_prompt(store(), Task::syllable, Strategy::pcot(5), "Hello there.");
  for (const auto& t : syl.turns)
    if (t.role == Role::assistant) EXPECT_FALSE(std::all_of(t.content.begin(), t.content.end(), ::isdigit));
  EXPECT_EQ(syl.turns[7].role, Role::user);
  EXPECT_EQ(syl.turns[7].content, "22");
  auto g2p = build_prompt(store(), Task::g2p, Strategy::pcot(5), "basement");
  for (const auto& t : g2p.turns)
    if (t.role == Role::assistant) EXPECT_NE(t.content.find("pronunciation of"), std::string::npos);
  auto rhy = build_prompt(store(), Task::rhyme, Strategy::pcot(5), "education");
  for (const auto& t : rhy.turns)
    if (t.content.rfind("Here are some words", 0) == 0) EXPECT_EQ(t.role, Role::user);
}

TEST(BuildPrompt, ReproducesTemplateFileBytes) {
  // Oracle: read each JSON file directly and substitute by hand.
  for (auto [task, s] : all_pairs()) {
    auto path = pcot::testing::template_dir() / (pair_name(task, s) + ".json");
    auto doc = nlohmann::json::parse(pcot::testing::read_file(path));
    const std::string inst = "zebra";
    auto b = build_prompt(store(), task, s, inst);
    ASSERT_EQ(b.turns.size(), doc["turns"].size()) << path;
    for (std::size_t i = 0; i < b.turns.size(); ++i) {
      std::string expect = doc["turns"][i]["content"].get<std::string>();
      if (i + 1 == b.turns.size()) {
        for (auto p = expect.find("{text}"); p != std::string::npos; p = expect.find("{text}", p + inst.size()))
          expect.replace(p, 6, inst);
      }
      EXPECT_EQ(b.turns[i].content, expect) << path << " turn " << i;
      EXPECT_EQ(std::string(to_string(b.turns[i].role)), doc["turns"][i]["role"].get<std::string>());
    }
  }
}

TEST(BuildPrompt, Errors) {
  EXPECT_THROW(build_prompt(store(), Task::rhyme, Strategy::pcot(3), "a {text} b"), ValidationError);
  EXPECT_THROW(build_prompt(store(), Task::rhyme, Strategy::pcot(3), ""), ValidationError);
  EXPECT_THROW(build_prompt(store(), Task::rhyme, Strategy::pcot(3), "   "), ValidationError);

  ScratchDir dir("templates");
  std::filesystem::copy_file(pcot::testing::template_dir() / "rhyme_baseline.json", dir.path() / "rhyme_baseline.json");
  auto partial = TemplateStore::load(dir.path());
  EXPECT_NO_THROW(build_prompt(partial, Task::rhyme, Strategy::baseline(), "cat"));
  EXPECT_THROW(build_prompt(partial, Task::g2p, Strategy::pcot(5), "cat"), ValidationError);
}

TEST(TemplateStore, RejectsMalformedFiles) {
  ScratchDir dir("badtemplates");
  auto write = [&](const std::string& body) {
    std::ofstream(dir.path() / "rhyme_baseline.json") << body;
  };
  write(R"({"task":"rhyme","strategy":"baseline","turns":[{"role":"system","content":"{text}"},{"role":"user","content":"x {text}"}]})");
  EXPECT_THROW(TemplateStore::load(dir.path()), ValidationError);
  write(R"({"task":"rhyme","strategy":"baseline","turns":[{"role":"system","content":"s"},{"role":"user","content":"no slot"}]})");
  EXPECT_THROW(TemplateStore::load(dir.path()), ValidationError);
  write(R"({"task":"g2p","strategy":"baseline","turns":[{"role":"system","content":"s"},{"role":"user","content":"{text}"}]})");
  EXPECT_THROW(TemplateStore::load(dir.path()), ValidationError);
  write(R"({"task":"rhyme","strategy":"baseline","turns":[{"role":"narrator","content":"s"},{"role":"user","content":"{text}"}]})");
  EXPECT_THROW(TemplateStore::load(dir.path()), ValidationError);
  write("{ not json");
  EXPECT_THROW(TemplateStore::load(dir.path()), ValidationError);
}

TEST(Validate, EveryPairPasses) {
  for (auto [task, s] : all_pairs()) {
    auto b = build_prompt(store(), task, s, sample_instance(task));
    auto r = validate_template(b, store());
    EXPECT_TRUE(r.ok()) << pair_name(task, s) << ": " << (r.ok() ? "" : r.violations().front().detail);
    EXPECT_EQ(r.get(CheckId::concept_definition).applicable, s.is_pcot());
  }
}

TEST(Validate, TwoExemplarsLabelledPcot3) {
  auto b = build_prompt(store(), Task::syllable, Strategy::pcot(3), "Hello there.");
  // Drop the third 6-turn exemplar exchange (turns 15..20).
  b.turns.erase(b.turns.begin() + 15, b.turns.begin() + 21);
  auto r = validate_template(b, store());
  EXPECT_FALSE(r.get(CheckId::exemplar_count).passed);
  EXPECT_TRUE(r.get(CheckId::scaffold_removal).passed);
  EXPECT_FALSE(r.ok());
}

TEST(Validate, ScaffoldInFinalTurn) {
  auto b = build_prompt(store(), Task::syllable, Strategy::pcot(5), "Hello there.");
  b.turns.back().content += " Start by identifying the vowel sounds in each word.";
  auto r = validate_template(b, store());
  EXPECT_FALSE(r.get(CheckId::scaffold_removal).passed);
  EXPECT_TRUE(r.get(CheckId::exemplar_count).passed);
}

TEST(Validate, StructuralViolations) {
  auto b = build_prompt(store(), Task::g2p, Strategy::pcot(1), "cat");
  auto no_system = b;
  no_system.turns.erase(no_system.turns.begin());
  auto r = validate_template(no_system, store());
  EXPECT_FALSE(r.get(CheckId::role_setting).passed);
  EXPECT_FALSE(r.get(CheckId::structure).passed);

  auto no_concept = b;
  for (auto& t : no_concept.turns) t.content = text::replace_all(t.content, "(GAE)", "");
  EXPECT_FALSE(validate_template(no_concept, store()).get(CheckId::concept_definition).passed);

  auto assistant_last = b;
  assistant_last.turns.emplace_back(Role::assistant, "ok");
  EXPECT_FALSE(validate_template(assistant_last, store()).get(CheckId::structure).passed);
}

TEST(Validate, TargetEqualToExemplarDoesNotShiftCount) {
  for (Task t : kAllTasks)
    for (const auto& s : Strategy::all())
      for (const auto& e : few_shot_exemplars(t)) {
        auto r = validate_template(build_prompt(store(), t, s, e.input), store());
        EXPECT_TRUE(r.get(CheckId::exemplar_count).passed) << pair_name(t, s) << " / " << e.input;
      }
}

TEST(Properties, DeterministicAndPlaceholderFree) {
  std::mt19937 rng(7);
  const std::string alphabet = "abcdefghijklmnopqrstuvwxyz '’.,-{}ɹə";
  for (int trial = 0; trial < 300; ++trial) {
    std::string inst;
    std::size_t len = 1 + rng() % 24;
    for (std::size_t i = 0; i < len; ++i) inst.push_back(alphabet[rng() % alphabet.size()]);
    if (text::trim(inst).empty() || inst.find("{text}") != std::string::npos) continue;
    auto [task, s] = all_pairs()[rng() % all_pairs().size()];
    PromptBundle a = [&] {
      try {
        return build_prompt(store(), task, s, inst);
      } catch (const ValidationError&) {
        ADD_FAILURE() << "rejected '" << inst << "'";
        throw;
      }
    }();
    EXPECT_EQ(a, build_prompt(store(), task, s, inst));
    for (const auto& t : a.turns) EXPECT_EQ(t.content.find("{text}"), std::string::npos);
  }
}

TEST(Properties, PcotPrefixesAgree) {
  // The printed dialogues differ in wording between levels (system text, transcription
  // symbols), so the shared prefix is checked on the role sequence and on the order of
  // worked examples.
  auto exemplar_order = [](const PromptBundle& b) {
    std::vector<std::string> seen;
    for (std::size_t i = 0; i + 1 < b.turns.size(); ++i)
      for (const auto& e : few_shot_exemplars(b.task))
        if (b.turns[i].content.find(e.input) != std::string::npos &&
            std::find(seen.begin(), seen.end(), e.input) == seen.end())
          seen.push_back(e.input);
    return seen;
  };
  for (Task t : kAllTasks) {
    for (auto [n, m] : {std::pair{1, 3}, std::pair{1, 5}, std::pair{3, 5}}) {
      auto small = build_prompt(store(), t, Strategy::pcot(n), sample_instance(t));
      auto large = build_prompt(store(), t, Strategy::pcot(m), sample_instance(t));
      auto rs = roles(small), rl = roles(large);
      rs.pop_back();
      ASSERT_LE(rs.size(), rl.size());
      EXPECT_TRUE(std::equal(rs.begin(), rs.end(), rl.begin())) << to_string(t) << " " << n << "/" << m;
      auto es = exemplar_order(small), el = exemplar_order(large);
      ASSERT_LE(es.size(), el.size());
      EXPECT_TRUE(std::equal(es.begin(), es.end(), el.begin()));
    }
  }
}

TEST(Golden, Snapshots) {
  // Set PCOT_UPDATE_GOLDEN=1 to rewrite the snapshots after an intended template change.
  const bool update = std::getenv("PCOT_UPDATE_GOLDEN") != nullptr;
  auto dir = pcot::testing::source_dir() / "tests" / "golden";
  for (auto [task, s] : all_pairs()) {
    auto path = dir / (pair_name(task, s) + ".txt");
    auto got = render(build_prompt(store(), task, s, sample_instance(task)));
    if (update) {
      std::filesystem::create_directories(dir);
      std::ofstream(path, std::ios::binary) << got;
      continue;
    }
    ASSERT_TRUE(std::filesystem::exists(path)) << path;
    EXPECT_EQ(got, pcot::testing::read_file(path)) << path;
  }
}
