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

#include <array>
#include <cstdlib>
#include <optional>
#include <vector>

namespace pcot::analysis {

struct SyllableObservation {
  std::optional<long long> predicted;  // empty on parse failure
  long long gold;
};

/// Counts over |pred - gold| in {0, 1, 2, 3, 4+}. Parse failures count as 4+.
struct ErrorHistogram {
  std::array<std::size_t, 5> counts{};
  std::array<double, 5> percent{};
  std::size_t parse_failures = 0;
  std::size_t total = 0;
};

inline ErrorHistogram error_distribution(const std::vector<SyllableObservation>& obs) {
  ErrorHistogram h;
  for (const auto& o : obs) {
    std::size_t bucket = 4;
    if (o.predicted) {
      long long d = std::llabs(*o.predicted - o.gold);
      bucket = d >= 4 ? 4 : static_cast<std::size_t>(d);
    } else {
      ++h.parse_failures;
    }
    ++h.counts[bucket];
    ++h.total;
  }
  if (h.total)
    for (std::size_t i = 0; i < 5; ++i) h.percent[i] = 100.0 * static_cast<double>(h.counts[i]) / static_cast<double>(h.total);
  return h;
}

}  // namespace pcot::analysis
