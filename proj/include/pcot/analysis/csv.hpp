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

#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "pcot/analysis/complexity.hpp"
#include "pcot/analysis/thresholds.hpp"

namespace pcot::analysis {

inline std::string format_number(double x, int precision = 6) {
  std::ostringstream ss;
  ss.precision(precision);
  ss << x;
  return ss.str();
}

/// Quotes a field when it contains a separator, quote or newline.
inline std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

inline void write_bins_csv(std::ostream& os, const std::vector<BinRow>& rows) {
  os << "bin_low,bin_high,strategy,accuracy,n\n";
  for (const auto& r : rows)
    os << format_number(r.bin_low) << ',' << format_number(r.bin_high) << ',' << csv_field(r.strategy) << ','
       << format_number(r.accuracy) << ',' << r.n << '\n';
}

struct SubsetThresholdDeltas {
  std::string subset;
  std::vector<ThresholdDelta> deltas;
};

inline void write_thresholds_csv(std::ostream& os, const std::vector<SubsetThresholdDeltas>& groups) {
  os << "threshold,delta,subset\n";
  for (const auto& g : groups)
    for (const auto& d : g.deltas)
      os << format_number(d.threshold) << ',' << format_number(d.delta) << ',' << csv_field(g.subset) << '\n';
}

}  // namespace pcot::analysis
