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

#include <cstdio>
#include <filesystem>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "pcot/analysis/complexity.hpp"
#include "pcot/analysis/csv.hpp"
#include "pcot/analysis/errors.hpp"
#include "pcot/analysis/mann_whitney.hpp"
#include "pcot/analysis/thresholds.hpp"
#include "pcot/eval/record.hpp"
#include "pcot/runner/run.hpp"

namespace pcot::runner {

using eval::EvalRecord;

/// Records matching a strategy selector: an exact id ("pcot3") or a family ("pcot", "fewshot", "baseline").
inline bool strategy_matches(const std::string& strategy_id, const std::string& selector) {
  if (strategy_id == selector) return true;
  return prompt::Strategy::parse(strategy_id).family() == selector;
}

/// Mean score per instance over all matching records (pooled across models and strategies).
inline std::map<std::string, double> per_instance_means(const std::vector<EvalRecord>& recs, prompt::Task task,
                                                        const std::string& selector,
                                                        std::optional<eval::SubsetTag> subset = std::nullopt) {
  std::map<std::string, std::pair<double, std::size_t>> acc;
  for (const auto& r : recs) {
    if (r.task != task || !strategy_matches(r.strategy, selector)) continue;
    if (subset && r.subset != *subset) continue;
    auto& a = acc[r.instance_id];
    a.first += r.score;
    ++a.second;
  }
  std::map<std::string, double> out;
  for (const auto& [id, a] : acc) out[id] = a.first / static_cast<double>(a.second);
  return out;
}

inline std::vector<eval::SubsetTag> subsets_of(const std::vector<EvalRecord>& recs, prompt::Task task) {
  std::set<eval::SubsetTag> s;
  for (const auto& r : recs)
    if (r.task == task) s.insert(r.subset);
  return {s.begin(), s.end()};
}

inline std::set<std::string> strategies_of(const std::vector<EvalRecord>& recs, prompt::Task task) {
  std::set<std::string> s;
  for (const auto& r : recs)
    if (r.task == task) s.insert(r.strategy);
  return s;
}

/// Strategy ids in report column order, restricted to those present.
inline std::vector<std::string> ordered_strategies(const std::set<std::string>& present) {
  std::vector<std::string> out;
  for (const auto& s : prompt::Strategy::all())
    if (present.count(s.id())) out.push_back(s.id());
  return out;
}

// ---------------------------------------------------------------------------
// Analyses over stored records

inline std::string complexity_csv(const std::vector<EvalRecord>& recs, eval::SubsetTag subset, const std::string& edges_spec) {
  std::vector<analysis::ScoredItem> items;
  std::vector<double> scores;
  for (const auto& r : recs) {
    if (r.task != prompt::Task::g2p || r.subset != subset) continue;
    double s = analysis::complexity_score(r.input_text).S();
    items.push_back({s, r.strategy, r.score});
    scores.push_back(s);
  }
  if (items.empty()) throw ValidationError("no g2p records for subset " + eval::to_string(subset));
  auto edges = edges_spec == "quintile" ? analysis::quintile_edges(scores) : analysis::preset_edges(edges_spec);
  std::ostringstream os;
  analysis::write_bins_csv(os, analysis::bin_by_complexity(items, edges));
  return os.str();
}

/// Threshold deltas of selector `a` minus selector `b` on rhyme records, per subset.
inline std::string thresholds_csv(const std::vector<EvalRecord>& recs, const std::string& a, const std::string& b) {
  std::vector<analysis::SubsetThresholdDeltas> groups;
  for (auto subset : subsets_of(recs, prompt::Task::rhyme)) {
    auto ma = per_instance_means(recs, prompt::Task::rhyme, a, subset);
    auto mb = per_instance_means(recs, prompt::Task::rhyme, b, subset);
    if (ma.empty() || mb.empty()) continue;
    groups.push_back({eval::to_string(subset), analysis::threshold_deltas(ma, mb)});
  }
  std::ostringstream os;
  analysis::write_thresholds_csv(os, groups);
  return os.str();
}

inline std::string errors_csv(const std::vector<EvalRecord>& recs) {
  std::ostringstream os;
  os << "model,strategy,bucket,count,percent,parse_failures\n";
  std::map<std::pair<std::string, std::string>, std::vector<analysis::SyllableObservation>> groups;
  for (const auto& r : recs) {
    if (r.task != prompt::Task::syllable || !r.gold.is_number_integer()) continue;
    std::optional<long long> pred;
    if (r.parsed.is_number_integer()) pred = r.parsed.get<long long>();
    groups[{r.model_id, r.strategy}].push_back({pred, r.gold.get<long long>()});
  }
  static const char* labels[] = {"0", "1", "2", "3", "4+"};
  for (const auto& [key, obs] : groups) {
    auto h = analysis::error_distribution(obs);
    for (int i = 0; i < 5; ++i)
      os << analysis::csv_field(key.first) << ',' << key.second << ',' << labels[i] << ',' << h.counts[i] << ','
         << analysis::format_number(h.percent[i]) << ',' << h.parse_failures << '\n';
  }
  return os.str();
}

/// U tests on g2p per-instance means: every P-CoT strategy against every other strategy present.
inline std::string mann_whitney_csv(const std::vector<EvalRecord>& recs) {
  std::ostringstream os;
  os << "strategy_a,strategy_b,subset,n1,n2,u,p_value,method\n";
  auto strategies = ordered_strategies(strategies_of(recs, prompt::Task::g2p));
  for (auto subset : subsets_of(recs, prompt::Task::g2p)) {
    for (const auto& a : strategies) {
      if (prompt::Strategy::parse(a).family() != "pcot") continue;
      for (const auto& b : strategies) {
        if (b == a || (prompt::Strategy::parse(b).family() == "pcot" && b < a)) continue;
        auto ma = per_instance_means(recs, prompt::Task::g2p, a, subset);
        auto mb = per_instance_means(recs, prompt::Task::g2p, b, subset);
        if (ma.empty() || mb.empty()) continue;
        std::vector<double> xa, xb;
        for (const auto& [id, v] : ma) xa.push_back(v);
        for (const auto& [id, v] : mb) xb.push_back(v);
        auto r = analysis::mann_whitney_u(xa, xb);
        os << a << ',' << b << ',' << eval::to_string(subset) << ',' << r.n1 << ',' << r.n2 << ','
           << analysis::format_number(r.u_statistic, 10) << ',' << analysis::format_number(r.p_value, 10) << ','
           << analysis::to_string(r.method) << '\n';
      }
    }
  }
  return os.str();
}

// ---------------------------------------------------------------------------
// Markdown tables

inline std::string one_decimal(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.1f", x);
  return buf;
}

inline std::string task_title(prompt::Task t) {
  switch (t) {
    case prompt::Task::rhyme: return "Rhyme word generation (success rate, common/rare)";
    case prompt::Task::g2p: return "G2P conversion (exact match, low/high)";
    case prompt::Task::syllable: return "Syllable counting (exact match)";
  }
  return "";
}

inline std::vector<eval::SubsetTag> cell_subsets(prompt::Task t) {
  switch (t) {
    case prompt::Task::rhyme: return {eval::SubsetTag::common, eval::SubsetTag::rare};
    case prompt::Task::g2p: return {eval::SubsetTag::low, eval::SubsetTag::high};
    case prompt::Task::syllable: return {eval::SubsetTag::none};
  }
  return {};
}

inline std::string markdown_tables(const std::vector<EvalRecord>& recs) {
  const auto summaries = eval::aggregate(recs);
  std::map<std::tuple<std::string, std::string, prompt::Task, eval::SubsetTag>, double> cell;
  std::map<prompt::Task, std::set<std::string>> models;
  for (const auto& s : summaries) {
    cell[{s.model_id, s.strategy, s.task, s.subset}] = s.mean_score;
    models[s.task].insert(s.model_id);
  }
  std::ostringstream os;
  os << "# Results\n";
  for (prompt::Task task : prompt::kAllTasks) {
    if (!models.count(task)) continue;
    auto subsets = cell_subsets(task);
    // Datasets without split tags fall back to a single untagged column value.
    auto present = subsets_of(recs, task);
    if (present.size() == 1 && present.front() == eval::SubsetTag::none) subsets = {eval::SubsetTag::none};
    os << "\n## " << task_title(task) << "\n\n| Model |";
    for (const auto& s : prompt::Strategy::all()) os << ' ' << s.label() << " |";
    os << "\n|---|";
    for (std::size_t i = 0; i < prompt::Strategy::all().size(); ++i) os << "---|";
    os << '\n';
    for (const auto& model : models[task]) {
      os << "| " << model << " |";
      for (const auto& s : prompt::Strategy::all()) {
        std::vector<std::string> parts;
        bool any = false;
        for (auto subset : subsets) {
          auto it = cell.find({model, s.id(), task, subset});
          any = any || it != cell.end();
          parts.push_back(it == cell.end() ? "-" : one_decimal(it->second));
        }
        std::string text = "-";
        if (any) {
          text = parts[0];
          for (std::size_t i = 1; i < parts.size(); ++i) text += "/" + parts[i];
        }
        os << ' ' << text << " |";
      }
      os << '\n';
    }
  }
  return os.str();
}

inline std::string escape_snippet(const std::string& s, std::size_t max_len = 80) {
  std::string out;
  for (char c : s.substr(0, max_len)) {
    if (c == '\n') out += "\\n";
    else if (c == '|') out += "\\|";
    else if (c == '`') out += '\'';
    else out += c;
  }
  if (s.size() > max_len) out += "...";
  return out;
}

inline std::string parse_failure_appendix(const std::vector<EvalRecord>& recs) {
  std::ostringstream os;
  os << "# Parse failures\n\n| Model | Strategy | Task | Failures | Rate |\n|---|---|---|---|---|\n";
  bool any = false;
  for (const auto& s : eval::aggregate(recs)) {
    if (s.parse_failure_rate == 0) continue;
    any = true;
    auto failures = static_cast<std::size_t>(s.parse_failure_rate * static_cast<double>(s.n) + 0.5);
    os << "| " << s.model_id << " | " << s.strategy << " | " << prompt::to_string(s.task) << "/" << eval::to_string(s.subset)
       << " | " << failures << "/" << s.n << " | " << one_decimal(100.0 * s.parse_failure_rate) << "% |\n";
  }
  if (!any) os << "| (none) | | | | |\n";
  os << "\n## Examples\n\n";
  std::map<std::tuple<std::string, std::string, prompt::Task>, int> shown;
  for (const auto& r : recs) {
    if (!r.parse_failed()) continue;
    auto& n = shown[{r.model_id, r.strategy, r.task}];
    if (n++ >= 3) continue;
    os << "- " << r.model_id << " / " << r.strategy << " / " << r.instance_id << ": `" << escape_snippet(r.raw_text)
       << "` (" << r.parse_error << ")\n";
  }
  return os.str();
}

/// Writes the report for a completed run and returns the files written.
inline std::vector<std::filesystem::path> write_report(const RunPaths& paths) {
  auto manifest = load_manifest(paths);
  if (manifest.status != "complete")
    throw ValidationError("run '" + manifest.run_id + "' is incomplete (" + std::to_string(manifest.pending) +
                          " pending jobs); resume it before reporting");
  auto recs = load_records(paths);
  std::filesystem::create_directories(paths.report_dir());
  std::vector<std::filesystem::path> written;
  auto emit = [&](const std::string& name, const std::string& body) {
    auto p = paths.report_dir() / name;
    write_file_atomic(p, body);
    written.push_back(p);
  };
  emit("tables.md", markdown_tables(recs));
  emit("parse_failures.md", parse_failure_appendix(recs));
  for (auto subset : subsets_of(recs, prompt::Task::g2p))
    emit("complexity_bins_g2p_" + eval::to_string(subset) + ".csv", complexity_csv(recs, subset, "quintile"));
  if (!subsets_of(recs, prompt::Task::g2p).empty()) emit("mann_whitney_g2p.csv", mann_whitney_csv(recs));
  if (!subsets_of(recs, prompt::Task::rhyme).empty()) {
    auto present = strategies_of(recs, prompt::Task::rhyme);
    auto has_family = [&](const std::string& f) {
      return std::any_of(present.begin(), present.end(), [&](const std::string& s) { return strategy_matches(s, f); });
    };
    std::string b = has_family("fewshot") ? "fewshot" : "baseline";
    if (has_family("pcot") && has_family(b)) emit("thresholds_rhyme_pcot_vs_" + b + ".csv", thresholds_csv(recs, "pcot", b));
  }
  if (!subsets_of(recs, prompt::Task::syllable).empty()) emit("errors_syllable.csv", errors_csv(recs));
  return written;
}

}  // namespace pcot::runner
