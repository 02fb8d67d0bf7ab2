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

#include <map>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "pcot/eval/record.hpp"
#include "pcot/llm/backends.hpp"
#include "pcot/llm/cache.hpp"

namespace pcot::runner {

/// Reply a perfect model would give for an instance.
inline std::string oracle_answer(const eval::TaskInstance& inst) {
  switch (inst.task) {
    case prompt::Task::rhyme: {
      const auto& gold = std::get<phonology::RhymeGoldSet>(inst.gold);
      std::string out = "Here are some words that rhyme with " + inst.input_text + ":";
      std::size_t n = 0;
      for (const auto& w : gold.members) {
        if (n == eval::kRequestedRhymes) break;
        out += (n++ ? ", " : " ") + w;
      }
      return out;
    }
    case prompt::Task::g2p:
      return "/" + std::get<std::vector<phonology::IpaTranscription>>(inst.gold).front().text + "/";
    case prompt::Task::syllable:
      return std::to_string(std::get<eval::SyllableGold>(inst.gold).count);
  }
  return "";
}

/// Deterministic wrong reply, used by the noisy oracle.
inline std::string corrupted_answer(const eval::TaskInstance& inst, unsigned salt) {
  switch (inst.task) {
    case prompt::Task::rhyme: {
      static const std::vector<std::string> filler = {"table", "orange", "window", "purple", "music", "river"};
      std::string out = "Here are some words that rhyme with " + inst.input_text + ":";
      const auto& gold = std::get<phonology::RhymeGoldSet>(inst.gold);
      std::size_t keep = salt % 3, n = 0;
      for (const auto& w : gold.members) {
        if (n == keep) break;
        out += (n++ ? ", " : " ") + w;
      }
      for (std::size_t i = 0; n < eval::kRequestedRhymes; ++i, ++n) out += (n ? ", " : " ") + filler[(salt + i) % filler.size()];
      return out;
    }
    case prompt::Task::g2p: {
      auto t = std::get<std::vector<phonology::IpaTranscription>>(inst.gold).front().text;
      return "The transcription is /" + t + "ə/.";
    }
    case prompt::Task::syllable:
      return "I count " + std::to_string(std::get<eval::SyllableGold>(inst.gold).count + 1 + salt % 3) + " syllables.";
  }
  return "";
}

/// Responder for a mock provider, chosen by options.mode:
///   "echo"          final user turn verbatim
///   "oracle"        gold answer for the instance
///   "noisy_oracle"  gold answer with probability options.accuracy, decided by a hash of the prompt
///   "scripted"      options.replies[input_text], else options.default_reply
inline llm::MockBackend::Responder make_mock_responder(const llm::ProviderConfig& cfg,
                                                       const std::vector<eval::TaskInstance>& instances) {
  const std::string mode = cfg.options.value("mode", std::string("echo"));
  std::map<std::pair<prompt::Task, std::string>, const eval::TaskInstance*> by_text;
  for (const auto& i : instances) by_text.emplace(std::make_pair(i.task, i.input_text), &i);
  auto lookup = [by_text](const llm::ChatRequest& req) -> const eval::TaskInstance& {
    auto it = by_text.find({req.task, req.target_text});
    if (it == by_text.end()) throw llm::ResponseFormatError("mock has no instance for '" + req.target_text + "'");
    return *it->second;
  };

  if (mode == "echo") return [](const llm::ChatRequest& req) { return req.turns.back().content; };
  if (mode == "oracle") return [lookup](const llm::ChatRequest& req) { return oracle_answer(lookup(req)); };
  if (mode == "noisy_oracle") {
    const double accuracy = cfg.options.value("accuracy", 0.5);
    const std::string salt = cfg.options.value("salt", std::string()) + cfg.model_id;
    return [lookup, accuracy, salt](const llm::ChatRequest& req) {
      std::string digest_input = salt;
      for (const auto& t : req.turns) digest_input += t.content;
      auto h = llm::sha256_hex(digest_input);
      unsigned v = static_cast<unsigned>(std::stoul(h.substr(0, 8), nullptr, 16));
      const auto& inst = lookup(req);
      if (static_cast<double>(v % 10000) / 10000.0 < accuracy) return oracle_answer(inst);
      return corrupted_answer(inst, v >> 16);
    };
  }
  if (mode == "scripted") {
    std::map<std::string, std::string> replies;
    if (auto it = cfg.options.find("replies"); it != cfg.options.end())
      for (const auto& [k, v] : it->items()) replies[k] = v.get<std::string>();
    std::optional<std::string> fallback;
    if (cfg.options.contains("default_reply")) fallback = cfg.options["default_reply"].get<std::string>();
    return [replies, fallback](const llm::ChatRequest& req) {
      auto it = replies.find(req.target_text);
      if (it != replies.end()) return it->second;
      if (fallback) return *fallback;
      throw llm::ResponseFormatError("no scripted reply for '" + req.target_text + "'");
    };
  }
  throw ValidationError("unknown mock mode '" + mode + "'");
}

}  // namespace pcot::runner
