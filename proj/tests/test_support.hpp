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
#include <sstream>
#include <string>
#include <vector>
#include <unistd.h>

#include <nlohmann/json.hpp>

#include "pcot/phonology/lexicon.hpp"

namespace pcot::testing {

inline std::filesystem::path source_dir() { return PCOT_SOURCE_DIR; }
inline std::filesystem::path data_dir() { return source_dir() / "data"; }
inline std::filesystem::path fixture_lexicon_path() { return data_dir() / "fixtures" / "test_lexicon.dict"; }
inline std::filesystem::path template_dir() { return data_dir() / "templates"; }

inline const phonology::PronunciationLexicon& fixture_lexicon() {
  static const auto lex = phonology::load_lexicon_file(fixture_lexicon_path().string());
  return lex;
}

inline std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline std::filesystem::path fixture_dataset(const std::string& task) {
  return data_dir() / "fixtures" / "datasets" / (task + ".jsonl");
}

/// Run config over the fixture datasets with one mock provider per model id.
inline nlohmann::json fixture_run_config(const std::filesystem::path& out_dir, const std::vector<std::string>& models,
                                         const std::vector<std::string>& strategies,
                                         const nlohmann::json& mock_options = {{"mode", "oracle"}}) {
  nlohmann::json providers = nlohmann::json::array();
  for (const auto& m : models) providers.push_back({{"model_id", m}, {"kind", "mock"}, {"options", mock_options}});
  return {{"run_id", "fixture"},
          {"output_dir", out_dir.string()},
          {"lexicon", fixture_lexicon_path().string()},
          {"templates", template_dir().string()},
          {"datasets",
           {{"rhyme", fixture_dataset("rhyme").string()},
            {"g2p", fixture_dataset("g2p").string()},
            {"syllable", fixture_dataset("syllable").string()}}},
          {"providers", providers},
          {"strategies", strategies},
          {"parallelism", 4}};
}

/// Fresh scratch directory under the system temp dir, removed on destruction.
class ScratchDir {
 public:
  explicit ScratchDir(const std::string& tag) {
    static int counter = 0;
    path_ = std::filesystem::temp_directory_path() /
            ("pcot-" + tag + "-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~ScratchDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  ScratchDir(const ScratchDir&) = delete;
  ScratchDir& operator=(const ScratchDir&) = delete;

  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

}  // namespace pcot::testing
