// Copyright 2026 The pgcheck Authors.
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

#include "pgcheck/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace pgcheck::stats {

namespace {

void check_value(double v) {
  if (!std::isfinite(v) || v <= 0.0) {
    throw Error("sample values must be strictly positive and finite");
  }
}

void require_non_empty(std::span<const double> samples) {
  if (samples.empty()) throw Error("empty sample");
}

double clamp_probability(double p) { return std::clamp(p, 0.0, 1.0); }

TestOutcome decide(double statistic, double p, double alpha, TestMethod m) {
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw Error("significance level must lie in (0,1)");
  }
  TestOutcome out;
  out.statistic = statistic;
  out.p_value = clamp_probability(p);
  out.alpha = alpha;
  out.rejected = out.p_value < alpha;
  out.method = m;
  return out;
}

struct RankedPair {
  double rank_sum_a = 0.0;
  // sum over tie groups of (t^3 - t)
  double tie_term = 0.0;
  bool has_ties = false;
};

RankedPair rank_pair(std::span<const double> a, std::span<const double> b) {
  struct Obs {
    double value;
    bool from_a;
  };
  std::vector<Obs> all;
  all.reserve(a.size() + b.size());
  for (double v : a) all.push_back({v, true});
  for (double v : b) all.push_back({v, false});
  std::sort(all.begin(), all.end(),
            [](const Obs& x, const Obs& y) { return x.value < y.value; });

  RankedPair out;
  std::size_t i = 0;
  while (i < all.size()) {
    std::size_t j = i + 1;
    while (j < all.size() && all[j].value == all[i].value) ++j;
    const double t = static_cast<double>(j - i);
    // 1-based ranks i+1 .. j share their average
    const double midrank = (static_cast<double>(i + 1) + static_cast<double>(j)) / 2.0;
    for (std::size_t k = i; k < j; ++k) {
      if (all[k].from_a) out.rank_sum_a += midrank;
    }
    if (t > 1.0) {
      out.has_ties = true;
      out.tie_term += t * t * t - t;
    }
    i = j;
  }
  return out;
}

}  // namespace

SampleVector::SampleVector(std::vector<double> values)
    : values_(std::move(values)) {
  for (double v : values_) check_value(v);
}

SampleVector::SampleVector(std::initializer_list<double> values)
    : SampleVector(std::vector<double>(values)) {}

void SampleVector::push_back(double value) {
  check_value(value);
  values_.push_back(value);
}

std::string_view to_string(TestMethod method) {
  switch (method) {
    case TestMethod::wilcoxon_exact: return "wilcoxon-exact";
    case TestMethod::wilcoxon_normal_approx: return "wilcoxon-normal-approx";
    case TestMethod::ks: return "ks";
  }
  return "unknown";
}

std::string significance_grade(double p_value) {
  if (p_value < 0.001) return "***";
  if (p_value < 0.01) return "**";
  if (p_value < 0.05) return "*";
  return "";
}

double mean(std::span<const double> samples) {
  require_non_empty(samples);
  return std::accumulate(samples.begin(), samples.end(), 0.0) /
         static_cast<double>(samples.size());
}

double sample_stddev(std::span<const double> samples) {
  if (samples.size() < 2) throw Error("insufficient samples");
  const double m = mean(samples);
  double ss = 0.0;
  for (double v : samples) ss += (v - m) * (v - m);
  return std::sqrt(ss / static_cast<double>(samples.size() - 1));
}

double median(std::span<const double> samples) {
  require_non_empty(samples);
  std::vector<double> v(samples.begin(), samples.end());
  const std::size_t mid = v.size() / 2;
  std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid), v.end());
  const double upper = v[mid];
  if (v.size() % 2 == 1) return upper;
  const double lower =
      *std::max_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid));
  return (lower + upper) / 2.0;
}

double rse(std::span<const double> samples) {
  if (samples.size() < 2) throw Error("insufficient samples");
  const double n = static_cast<double>(samples.size());
  return sample_stddev(samples) / std::sqrt(n) / mean(samples);
}

double cov_over_window(std::span<const double> per_step_statistics,
                       std::size_t window) {
  if (window < 2) throw Error("window must be at least 2");
  if (per_step_statistics.size() < window) throw Error("window not filled");
  const auto tail = per_step_statistics.last(window);
  return sample_stddev(tail) / mean(tail);
}

double wilcoxon_exact_upper_tail(std::size_t n_a, std::size_t n_b,
                                 double rank_sum) {
  const std::size_t n = n_a + n_b;
  const std::size_t max_sum = n * (n + 1) / 2;
  // counts[k][s]: number of k-subsets of {1..i} with sum s, rolled over i
  std::vector<std::vector<double>> counts(n_a + 1,
                                          std::vector<double>(max_sum + 1, 0.0));
  counts[0][0] = 1.0;
  for (std::size_t r = 1; r <= n; ++r) {
    for (std::size_t k = std::min(r, n_a); k >= 1; --k) {
      for (std::size_t s = max_sum; s >= r; --s) {
        counts[k][s] += counts[k - 1][s - r];
      }
    }
  }
  double total = 0.0;
  double tail = 0.0;
  for (std::size_t s = 0; s <= max_sum; ++s) {
    total += counts[n_a][s];
    if (static_cast<double>(s) >= rank_sum) tail += counts[n_a][s];
  }
  return tail / total;
}

TestOutcome wilcoxon_rank_sum(std::span<const double> a,
                              std::span<const double> b, double alpha) {
  require_non_empty(a);
  require_non_empty(b);
  const auto ranked = rank_pair(a, b);
  const std::size_t n_a = a.size();
  const std::size_t n_b = b.size();
  const std::size_t n = n_a + n_b;

  if (n <= kExactWilcoxonLimit && !ranked.has_ties) {
    const double p = wilcoxon_exact_upper_tail(n_a, n_b, ranked.rank_sum_a);
    return decide(ranked.rank_sum_a, p, alpha, TestMethod::wilcoxon_exact);
  }

  const double na = static_cast<double>(n_a);
  const double nb = static_cast<double>(n_b);
  const double nn = static_cast<double>(n);
  const double expected = na * (nn + 1.0) / 2.0;
  const double variance =
      na * nb / 12.0 * ((nn + 1.0) - ranked.tie_term / (nn * (nn - 1.0)));
  double p = 1.0;
  if (variance > 0.0) {
    const double z = (ranked.rank_sum_a - expected - 0.5) / std::sqrt(variance);
    p = 0.5 * std::erfc(z / std::sqrt(2.0));
  }
  return decide(ranked.rank_sum_a, p, alpha, TestMethod::wilcoxon_normal_approx);
}

TestOutcome ks_two_sample(std::span<const double> a, std::span<const double> b,
                          double alpha) {
  require_non_empty(a);
  require_non_empty(b);
  std::vector<double> sa(a.begin(), a.end());
  std::vector<double> sb(b.begin(), b.end());
  std::sort(sa.begin(), sa.end());
  std::sort(sb.begin(), sb.end());

  const double na = static_cast<double>(sa.size());
  const double nb = static_cast<double>(sb.size());
  // Walk the merged support; both ECDFs are evaluated right after each jump.
  double d_plus = 0.0;
  std::size_t i = 0;
  std::size_t j = 0;
  while (i < sa.size() || j < sb.size()) {
    double x;
    if (j == sb.size() || (i < sa.size() && sa[i] <= sb[j])) {
      x = sa[i];
    } else {
      x = sb[j];
    }
    while (i < sa.size() && sa[i] == x) ++i;
    while (j < sb.size() && sb[j] == x) ++j;
    d_plus = std::max(d_plus, static_cast<double>(j) / nb - static_cast<double>(i) / na);
  }
  const double p = std::exp(-2.0 * d_plus * d_plus * na * nb / (na + nb));
  return decide(d_plus, p, alpha, TestMethod::ks);
}

}  // namespace pgcheck::stats
