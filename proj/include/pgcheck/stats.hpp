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

#pragma once

#include <initializer_list>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "pgcheck/error.hpp"

namespace pgcheck::stats {

/// Ordered run-times in microseconds. Every value is strictly positive and
/// finite; insertion order is kept because window metrics depend on it.
class SampleVector {
 public:
  SampleVector() = default;
  explicit SampleVector(std::vector<double> values);
  SampleVector(std::initializer_list<double> values);

  void push_back(double value);

  [[nodiscard]] std::span<const double> values() const { return values_; }
  [[nodiscard]] std::size_t size() const { return values_.size(); }
  [[nodiscard]] bool empty() const { return values_.empty(); }
  [[nodiscard]] double operator[](std::size_t i) const { return values_[i]; }

  operator std::span<const double>() const { return values_; }  // NOLINT

  friend bool operator==(const SampleVector&, const SampleVector&) = default;

 private:
  std::vector<double> values_;
};

enum class TestMethod { wilcoxon_exact, wilcoxon_normal_approx, ks };

std::string_view to_string(TestMethod method);

/// Significance grade used by the report layer: "*" p<0.05, "**" p<0.01,
/// "***" p<0.001, empty otherwise.
std::string significance_grade(double p_value);

struct TestOutcome {
  double statistic = 0.0;
  double p_value = 1.0;
  bool rejected = false;
  double alpha = 0.05;
  TestMethod method = TestMethod::wilcoxon_exact;
};

inline constexpr double kDefaultAlpha = 0.05;

/// Largest combined sample size for which the exact rank-sum null
/// distribution is enumerated (tie-free data only).
inline constexpr std::size_t kExactWilcoxonLimit = 20;

double mean(std::span<const double> samples);
/// Sample standard deviation with the n-1 denominator.
double sample_stddev(std::span<const double> samples);

/// Middle order statistic; mean of the two middle values for even counts.
double median(std::span<const double> samples);

/// Relative standard error of the mean: (sd / sqrt(n)) / mean.
double rse(std::span<const double> samples);

/// Coefficient of variation over the last `window` entries only.
double cov_over_window(std::span<const double> per_step_statistics,
                       std::size_t window);

/// One-sided Wilcoxon rank-sum test of "a is stochastically greater than b".
///
/// The statistic is the rank sum of `a` using midranks for ties. Tie-free
/// inputs with a combined size of at most kExactWilcoxonLimit use the exact
/// permutation distribution; everything else uses the normal approximation
/// with tie correction and a 0.5 continuity correction.
TestOutcome wilcoxon_rank_sum(std::span<const double> a,
                              std::span<const double> b,
                              double alpha = kDefaultAlpha);

/// Exact upper-tail probability P(W >= rank_sum) of the rank sum W of a
/// random n_a-subset of the ranks 1..n_a+n_b. `rank_sum` may be a half
/// integer; it is compared against integer sums.
double wilcoxon_exact_upper_tail(std::size_t n_a, std::size_t n_b,
                                 double rank_sum);

/// One-sided two-sample Kolmogorov-Smirnov test of "a is stochastically
/// greater than b". Statistic D+ = sup_x (F_b(x) - F_a(x)); p-value from the
/// asymptotic law exp(-2 D+^2 n_a n_b / (n_a + n_b)).
TestOutcome ks_two_sample(std::span<const double> a,
                          std::span<const double> b,
                          double alpha = kDefaultAlpha);

}  // namespace pgcheck::stats
