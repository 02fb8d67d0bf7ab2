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
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "pcot/error.hpp"
#include "pcot/util/text.hpp"

namespace pcot::runner {

/// Splits one CSV record. Quoted fields may contain commas and doubled quotes; no embedded newlines.
inline std::vector<std::string> split_csv_line(std::string_view line) {
  std::vector<std::string> out(1);
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        out.back() += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        out.back() += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      out.emplace_back();
    } else if (c != '\r') {
      out.back() += c;
    }
  }
  if (quoted) throw ValidationError("unterminated quote");
  return out;
}

/// Rows of a headed CSV file as column-name maps.
inline std::vector<std::map<std::string, std::string>> read_csv(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::string line;
  if (!std::getline(in, line)) throw ValidationError(path.string() + ": empty file");
  if (line.rfind("\xEF\xBB\xBF", 0) == 0) line.erase(0, 3);
  std::vector<std::string> header;
  for (auto& h : split_csv_line(line)) header.push_back(text::ascii_lower(std::string(text::trim(h))));
  std::vector<std::map<std::string, std::string>> rows;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (text::trim(line).empty()) continue;
    std::vector<std::string> cells;
    try {
      cells = split_csv_line(line);
    } catch (const std::exception& e) {
      throw FormatError(path.string(), lineno, e.what());
    }
    if (cells.size() > header.size()) throw FormatError(path.string(), lineno, "more cells than header columns");
    std::map<std::string, std::string> row;
    for (std::size_t i = 0; i < header.size(); ++i) row[header[i]] = i < cells.size() ? std::string(text::trim(cells[i])) : "";
    row["#line"] = std::to_string(lineno);
    rows.push_back(std::move(row));
  }
  return rows;
}

struct ImportSummary {
  std::map<std::string, std::size_t> written;  // output file name -> records
};

/// Converts a benchmark source directory into the JSONL datasets:
///   rhyme_common.csv, rhyme_rare.csv  (word)                 -> rhyme.jsonl
///   g2p_high.csv, g2p_low.csv         (word[, ipa])          -> g2p.jsonl
///   syllable.csv                      (sentence[, syllables]) -> syllable.jsonl
/// Missing gold columns become "lexicon", resolved at ingest time.
inline ImportSummary import_benchmark(const std::filesystem::path& source_dir, const std::filesystem::path& out_dir) {
  if (!std::filesystem::is_directory(source_dir)) throw IoError("source directory not found: " + source_dir.string());
  std::filesystem::create_directories(out_dir);
  ImportSummary summary;

  struct Part {
    std::string file, task, subset, text_col, gold_col, id_prefix;
  };
  const std::vector<Part> parts = {
      {"rhyme_common.csv", "rhyme", "common", "word", "", "rhyme-common-"},
      {"rhyme_rare.csv", "rhyme", "rare", "word", "", "rhyme-rare-"},
      {"g2p_high.csv", "g2p", "high", "word", "ipa", "g2p-high-"},
      {"g2p_low.csv", "g2p", "low", "word", "ipa", "g2p-low-"},
      {"syllable.csv", "syllable", "none", "sentence", "syllables", "syllable-"},
  };
  std::map<std::string, std::vector<nlohmann::json>> by_task;
  for (const auto& part : parts) {
    auto path = source_dir / part.file;
    if (!std::filesystem::exists(path)) continue;
    std::size_t n = 0;
    for (const auto& row : read_csv(path)) {
      auto it = row.find(part.text_col);
      if (it == row.end()) throw ValidationError(path.string() + ": missing column '" + part.text_col + "'");
      if (it->second.empty()) throw FormatError(path.string(), std::stoul(row.at("#line")), "empty " + part.text_col);
      nlohmann::json gold = "lexicon";
      if (auto g = row.find(part.gold_col); !part.gold_col.empty() && g != row.end() && !g->second.empty()) {
        if (part.task == "syllable") {
          try {
            gold = std::stoll(g->second);
          } catch (const std::exception&) {
            throw FormatError(path.string(), std::stoul(row.at("#line")), "syllable count is not an integer");
          }
        } else {
          gold = g->second;
        }
      }
      char id[16];
      std::snprintf(id, sizeof id, "%05zu", ++n);
      by_task[part.task].push_back({{"id", part.id_prefix + id},
                                    {"task", part.task},
                                    {"input_text", it->second},
                                    {"gold", gold},
                                    {"subset_tag", part.subset}});
    }
  }
  if (by_task.empty()) throw ValidationError("no benchmark files found in " + source_dir.string());
  for (const auto& [task, recs] : by_task) {
    std::ofstream out(out_dir / (task + ".jsonl"), std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + (out_dir / (task + ".jsonl")).string());
    for (const auto& r : recs) out << r.dump() << '\n';
    summary.written[task + ".jsonl"] = recs.size();
  }
  return summary;
}

}  // namespace pcot::runner
