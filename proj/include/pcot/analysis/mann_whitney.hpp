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
#include <cstdint>
#include <numeric>
#include <string>
#include <vector>

#include "pcot/error.hpp"

namespace pcot::analysis {

enum class MwuMethod { exact, normal_approx };

inline std::string to_string(MwuMethod m) { return m == MwuMethod::exact ? "exact" : "normal_approx"; }

struct StatTestResult {
  double u_statistic = 0;  // U for sample a
  double p_value = 1;      // two-sided
  MwuMethod method = MwuMethod::exact;
  std::size_t n1 = 0, n2 = 0;
};

struct MwuOptions {
  enum class Choice { automatic, exact, normal_approx };
  Choice method = Choice::automatic;
  std::size_t exact_max_n = 8;  // automatic picks exact when max(n1, n2) <= this
};

namespace detail {

/// Twice the midrank of every pooled observation (integers, so ties stay exact).
inline std::vector<std::int64_t> doubled_midranks(const std::vector<double>& pooled) {
  std::vector<std::size_t> idx(pooled.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t x, std::size_t y) { return pooled[x] < pooled[y]; });
  std::vector<std::int64_t> r2(pooled.size());
  for (std::size_t i = 0; i < idx.size();) {
    std::size_t j = i;
    while (j + 1 < idx.size() && pooled[idx[j + 1]] == pooled[idx[i]]) ++j;
    // ranks i+1 .. j+1 share the midrank (i+j+2)/2
    for (std::size_t k = i; k <= j; ++k) r2[idx[k]] = static_cast<std::int64_t>(i + j + 2);
    i = j + 1;
  }
  return r2;
}

inline double tie_term(const std::vector<double>& pooled) {
  auto s = pooled;
  std::sort(s.begin(), s.end());
  double acc = 0;
  for (std::size_t i = 0; i < s.size();) {
    std::size_t j = i;
    while (j < s.size() && s[j] == s[i]) ++j;
    double t = static_cast<double>(j - i);
    acc += t * t * t - t;
    i = j;
  }
  return acc;
}

}  // namespace detail

/// Two-sided Mann-Whitney U test with midranks for ties.
inline StatTestResult mann_whitney_u(const std::vector<double>& a, const std::vector<double>& b, MwuOptions opts = {}) {
  if (a.empty() || b.empty()) throw ValidationError("Mann-Whitney U needs two non-empty samples");
  const std::size_t n1 = a.size(), n2 = b.size(), N = n1 + n2;
  std::vector<double> pooled(a);
  pooled.insert(pooled.end(), b.begin(), b.end());
  for (double x : pooled)
    if (std::isnan(x)) throw ValidationError("Mann-Whitney U sample contains NaN");
  const auto r2 = detail::doubled_midranks(pooled);

  std::int64_t ra2 = 0;
  for (std::size_t i = 0; i < n1; ++i) ra2 += r2[i];
  // 2U = 2R_a - n1(n1+1); distance from the mean n1·n2/2 kept doubled.
  const std::int64_t n1n2 = static_cast<std::int64_t>(n1 * n2);
  const std::int64_t u2 = ra2 - static_cast<std::int64_t>(n1 * (n1 + 1));
  const std::int64_t dev2 = std::llabs(u2 - n1n2);

  StatTestResult res;
  res.n1 = n1;
  res.n2 = n2;
  res.u_statistic = static_cast<double>(u2) / 2.0;

  bool exact = opts.method == MwuOptions::Choice::exact ||
               (opts.method == MwuOptions::Choice::automatic && std::max(n1, n2) <= opts.exact_max_n);
  if (exact) {
    // Count n1-subsets of the pooled doubled ranks by their sum.
    const std::int64_t max_sum = std::accumulate(r2.begin(), r2.end(), std::int64_t{0});
    std::vector<std::vector<double>> ways(n1 + 1, std::vector<double>(static_cast<std::size_t>(max_sum) + 1, 0.0));
    ways[0][0] = 1.0;
    for (std::size_t i = 0; i < N; ++i)
      for (std::size_t k = std::min(i + 1, n1); k >= 1; --k)
        for (std::int64_t s = max_sum; s >= r2[i]; --s) ways[k][s] += ways[k - 1][s - r2[i]];
    double total = 0, extreme = 0;
    for (std::int64_t s = 0; s <= max_sum; ++s) {
      double w = ways[n1][s];
      if (w == 0) continue;
      total += w;
      std::int64_t d = std::llabs(s - static_cast<std::int64_t>(n1 * (n1 + 1)) - n1n2);
      if (d >= dev2) extreme += w;
    }
    res.method = MwuMethod::exact;
    res.p_value = std::min(1.0, extreme / total);
    return res;
  }

  const double nd = static_cast<double>(N);
  const double var = static_cast<double>(n1n2) / 12.0 * ((nd + 1.0) - detail::tie_term(pooled) / (nd * (nd - 1.0)));
  res.method = MwuMethod::normal_approx;
  if (var <= 0) {
    res.p_value = 1.0;
    return res;
  }
  const double z = std::max(0.0, static_cast<double>(dev2) / 2.0 - 0.5) / std::sqrt(var);
  res.p_value = std::min(1.0, std::erfc(z / std::sqrt(2.0)));
  return res;
}

}  // namespace pcot::analysis
