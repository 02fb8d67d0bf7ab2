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
#include <cmath>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "pcot/error.hpp"

namespace pcot::analysis {

/// Orthographic word complexity S = 0.4L + 0.3V + 0.3C, vowels = {a,e,i,o,u}.
struct ComplexityScore {
  std::string word;
  unsigned L = 0;
  unsigned V = 0;
  unsigned C = 0;
  long tenths = 0;  // 10·S, exact

  double S() const { return static_cast<double>(tenths) / 10.0; }
};

inline ComplexityScore complexity_score(std::string_view word) {
  ComplexityScore cs;
  for (unsigned char ch : word) {
    char c = static_cast<char>(std::tolower(ch));
    if (c < 'a' || c > 'z') continue;
    ++cs.L;
    if (c == 'a' || c == 'e' || c == 'i' || c == 'o' || c == 'u') ++cs.V;
  }
  if (cs.L == 0) throw ValidationError("complexity of a word with no letters");
  cs.word = std::string(word);
  cs.C = cs.L - cs.V;
  cs.tenths = 4L * cs.L + 3L * cs.V + 3L * cs.C;
  return cs;
}

/// Bin edges used for the low- and high-frequency G2P plots.
inline std::vector<double> preset_edges(std::string_view name) {
  if (name == "low") return {2.1, 3.5, 4.2, 5.6, 6.3, 14.7};
  if (name == "high") return {1.4, 3.5, 4.2, 4.9, 5.6, 9.8};
  throw ValidationError("unknown bin preset '" + std::string(name) + "'");
}

/// Quintile edges (nearest-rank) of the observed scores; duplicates collapsed.
inline std::vector<double> quintile_edges(std::vector<double> scores) {
  if (scores.empty()) throw ValidationError("no scores to bin");
  std::sort(scores.begin(), scores.end());
  std::vector<double> edges{scores.front()};
  const std::size_t n = scores.size();
  for (int q = 1; q <= 4; ++q) {
    std::size_t rank = (q * n + 4) / 5;  // ceil(q·n/5)
    double e = scores[std::max<std::size_t>(rank, 1) - 1];
    if (e > edges.back()) edges.push_back(e);
  }
  if (scores.back() > edges.back()) edges.push_back(scores.back());
  if (edges.size() == 1) edges.push_back(edges.front());  // single distinct score: one closed bin
  return edges;
}

struct ScoredItem {
  double complexity;
  std::string strategy;
  double score;  // per-instance score in [0,1]
};

struct BinRow {
  double bin_low;
  double bin_high;
  std::string strategy;
  double accuracy;  // percentage
  std::size_t n;
};

/// Index of the half-open bin [e_i, e_{i+1}) holding x; the last bin is closed.
inline std::size_t bin_index(const std::vector<double>& edges, double x) {
  if (x < edges.front() || x > edges.back())
    throw ValidationError("complexity " + std::to_string(x) + " outside the bin edges");
  for (std::size_t i = 0; i + 2 < edges.size(); ++i)
    if (x < edges[i + 1]) return i;
  return edges.size() - 2;
}

inline std::vector<BinRow> bin_by_complexity(const std::vector<ScoredItem>& items, const std::vector<double>& edges) {
  if (edges.size() < 2) throw ValidationError("need at least two bin edges");
  for (std::size_t i = 0; i + 1 < edges.size(); ++i)
    if (!(edges[i] < edges[i + 1]) && !(edges.size() == 2 && edges[0] == edges[1]))
      throw ValidationError("bin edges must be strictly ascending");
  std::map<std::pair<std::size_t, std::string>, std::pair<double, std::size_t>> acc;
  for (const auto& it : items) {
    auto& a = acc[{bin_index(edges, it.complexity), it.strategy}];
    a.first += it.score;
    ++a.second;
  }
  std::vector<BinRow> out;
  for (const auto& [key, a] : acc)
    out.push_back({edges[key.first], edges[key.first + 1], key.second, 100.0 * a.first / static_cast<double>(a.second), a.second});
  return out;
}

}  // namespace pcot::analysis
