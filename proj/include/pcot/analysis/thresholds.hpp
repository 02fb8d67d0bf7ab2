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

#include "pcot/error.hpp"

namespace pcot::analysis {

inline const std::vector<double>& default_thresholds() {
  static const std::vector<double> t = {0.0, 0.2, 0.4, 0.6, 0.8, 1.0};
  return t;
}

struct ThresholdDelta {
  double threshold;
  double delta;
};

/// Fraction of scores reaching t: score > 0 at t = 0, score >= t elsewhere.
inline double attainment(const std::map<std::string, double>& scores, double t) {
  if (scores.empty()) return 0.0;
  std::size_t hit = 0;
  for (const auto& [id, s] : scores) hit += (t == 0.0 ? s > 0.0 : s >= t - 1e-9) ? 1 : 0;
  return static_cast<double>(hit) / static_cast<double>(scores.size());
}

/// Per-threshold difference of attainment fractions, A minus B, keyed by instance id.
inline std::vector<ThresholdDelta> threshold_deltas(const std::map<std::string, double>& a,
                                                    const std::map<std::string, double>& b,
                                                    const std::vector<double>& thresholds = default_thresholds()) {
  if (a.size() != b.size()) throw ValidationError("threshold comparison over different instance sets");
  for (auto ia = a.begin(), ib = b.begin(); ia != a.end(); ++ia, ++ib)
    if (ia->first != ib->first) throw ValidationError("instance id mismatch: " + ia->first + " vs " + ib->first);
  std::vector<ThresholdDelta> out;
  for (double t : thresholds) out.push_back({t, attainment(a, t) - attainment(b, t)});
  return out;
}

}  // namespace pcot::analysis
