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

#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "pcot/error.hpp"
#include "pcot/eval/record.hpp"
#include "pcot/phonology/ipa.hpp"
#include "pcot/phonology/lexicon.hpp"
#include "pcot/phonology/rhyme.hpp"
#include "pcot/phonology/syllables.hpp"

namespace pcot::runner {

using eval::SubsetTag;
using eval::TaskInstance;
using prompt::Task;

/// Split sizes of the full benchmark.
struct ExpectedSplit {
  Task task;
  SubsetTag subset;
  std::size_t count;
};

inline const std::vector<ExpectedSplit>& expected_splits() {
  static const std::vector<ExpectedSplit> s = {
      {Task::rhyme, SubsetTag::common, 199}, {Task::rhyme, SubsetTag::rare, 110},
      {Task::g2p, SubsetTag::high, 2084},    {Task::g2p, SubsetTag::low, 1042},
      {Task::syllable, SubsetTag::none, 993},
  };
  return s;
}

inline bool subset_allowed(Task task, SubsetTag tag) {
  switch (task) {
    case Task::rhyme: return tag == SubsetTag::common || tag == SubsetTag::rare || tag == SubsetTag::none;
    case Task::g2p: return tag == SubsetTag::high || tag == SubsetTag::low || tag == SubsetTag::none;
    case Task::syllable: return tag == SubsetTag::none;
  }
  return false;
}

struct IngestResult {
  std::vector<TaskInstance> instances;
  std::map<std::pair<Task, SubsetTag>, std::size_t> counts;

  /// One line per split: observed vs. full-benchmark size.
  std::vector<std::string> split_report() const {
    std::vector<std::string> out;
    for (const auto& e : expected_splits()) {
      auto it = counts.find({e.task, e.subset});
      if (it == counts.end()) continue;
      out.push_back(std::string(prompt::to_string(e.task)) + "/" + eval::to_string(e.subset) + ": " +
                    std::to_string(it->second) + " instances (full benchmark: " + std::to_string(e.count) + ")" +
                    (it->second == e.count ? "" : " [subset]"));
    }
    return out;
  }

  bool matches_full_benchmark() const {
    for (const auto& e : expected_splits()) {
      auto it = counts.find({e.task, e.subset});
      if (it == counts.end() || it->second != e.count) return false;
    }
    return true;
  }
};

namespace detail {

inline eval::Gold parse_gold(const nlohmann::json& g, Task task, const std::string& input,
                             const phonology::PronunciationLexicon* lex) {
  const bool from_lexicon = g.is_string() && g.get<std::string>() == "lexicon";
  if (from_lexicon && !lex) throw ValidationError("gold \"lexicon\" requires a lexicon");
  switch (task) {
    case Task::rhyme: {
      if (from_lexicon) return phonology::build_gold_set(*lex, input);
      if (!g.is_array()) throw ValidationError("rhyme gold must be \"lexicon\" or a list of words");
      phonology::RhymeGoldSet set{text::normalize_word_token(input), {}};
      for (const auto& w : g) set.members.insert(text::normalize_word_token(w.get<std::string>()));
      set.members.erase(set.target);
      return set;
    }
    case Task::g2p: {
      std::vector<phonology::IpaTranscription> variants;
      if (from_lexicon) {
        const auto* prons = lex->find(input);
        if (!prons) throw ValidationError("'" + input + "' is not in the lexicon");
        for (const auto& p : *prons) {
          auto ipa = phonology::arpabet_to_ipa(p);
          if (std::find(variants.begin(), variants.end(), ipa) == variants.end()) variants.push_back(ipa);
        }
      } else if (g.is_string()) {
        variants.push_back(phonology::normalize_ipa(g.get<std::string>()));
      } else if (g.is_array() && !g.empty()) {
        for (const auto& v : g) variants.push_back(phonology::normalize_ipa(v.get<std::string>()));
      } else {
        throw ValidationError("g2p gold must be \"lexicon\", a transcription or a list of transcriptions");
      }
      for (const auto& v : variants)
        if (v.text.empty()) throw ValidationError("empty gold transcription");
      return variants;
    }
    case Task::syllable: {
      if (from_lexicon) {
        auto c = phonology::count_syllables_sentence(*lex, input);
        return eval::SyllableGold{c.count, c.heuristic};
      }
      if (!g.is_number_integer() || g.get<long long>() < 0)
        throw ValidationError("syllable gold must be \"lexicon\" or a non-negative integer");
      return eval::SyllableGold{static_cast<unsigned>(g.get<long long>()), false};
    }
  }
  throw ValidationError("unsupported task");
}

}  // namespace detail

/// Reads a JSONL dataset: one {id, task, input_text, gold, subset_tag} object per line.
inline IngestResult ingest_dataset(std::istream& in, const std::string& source, std::optional<Task> expected_task,
                                   const phonology::PronunciationLexicon* lex) {
  IngestResult res;
  std::set<std::string> ids;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (text::trim(line).empty()) continue;
    try {
      auto j = nlohmann::json::parse(line);
      if (!j.is_object()) throw ValidationError("record is not an object");
      for (const char* k : {"id", "task", "input_text", "gold"})
        if (!j.contains(k)) throw ValidationError(std::string("missing field '") + k + "'");
      TaskInstance inst{prompt::parse_task(j["task"].get<std::string>()), j["id"].get<std::string>(),
                        j["input_text"].get<std::string>(), eval::SyllableGold{}, SubsetTag::none};
      if (expected_task && inst.task != *expected_task)
        throw ValidationError("task '" + std::string(prompt::to_string(inst.task)) + "' in a " +
                              std::string(prompt::to_string(*expected_task)) + " dataset");
      if (inst.id.empty()) throw ValidationError("empty id");
      if (!ids.insert(inst.id).second) throw ValidationError("duplicate id '" + inst.id + "'");
      inst.subset = eval::parse_subset_tag(j.value("subset_tag", "none"));
      if (!subset_allowed(inst.task, inst.subset))
        throw ValidationError("subset tag '" + eval::to_string(inst.subset) + "' not valid for this task");
      inst.gold = detail::parse_gold(j["gold"], inst.task, inst.input_text, lex);
      inst.validate();
      ++res.counts[{inst.task, inst.subset}];
      res.instances.push_back(std::move(inst));
    } catch (const FormatError&) {
      throw;
    } catch (const std::exception& e) {
      throw FormatError(source, lineno, e.what());
    }
  }
  if (res.instances.empty()) throw ValidationError(source + ": dataset is empty");
  return res;
}

inline IngestResult ingest_dataset(const std::filesystem::path& path, std::optional<Task> expected_task,
                                   const phonology::PronunciationLexicon* lex) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open dataset " + path.string());
  return ingest_dataset(in, path.string(), expected_task, lex);
}

}  // namespace pcot::runner
