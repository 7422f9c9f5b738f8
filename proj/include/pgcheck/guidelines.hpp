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

#include <cstdint>
#include <istream>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "pgcheck/stats.hpp"

namespace pgcheck {

using Bytes = std::uint64_t;

/// Name of a collective ("Allreduce") or of a composite mock-up whose
/// components are joined by '+' ("Reduce+Bcast").
class FunctionId {
 public:
  FunctionId() = default;
  explicit FunctionId(std::string name);

  [[nodiscard]] const std::string& name() const { return name_; }
  [[nodiscard]] bool is_composite() const;
  [[nodiscard]] std::vector<FunctionId> components() const;

  friend auto operator<=>(const FunctionId&, const FunctionId&) = default;

 private:
  std::string name_;
};

/// Joins component names with '+'.
FunctionId composite(const std::vector<FunctionId>& parts);

}  // namespace pgcheck

namespace pgcheck::guidelines {

enum class Kind { monotony, split_robustness, pattern };

std::string_view to_string(Kind kind);
/// One-letter row tag used in report matrices: m, s, p.
char kind_tag(Kind kind);

/// Subject name used by the monotony and split templates before they are
/// bound to a concrete function.
inline constexpr std::string_view kAnyFunction = "*";

struct Guideline {
  Kind kind = Kind::pattern;
  FunctionId subject;
  std::optional<FunctionId> mockup;  // present iff kind == pattern
  std::string id;

  [[nodiscard]] bool is_template() const {
    return subject.name() == kAnyFunction;
  }
  /// Row label: "Gather <= Allgather" for patterns, the subject otherwise.
  [[nodiscard]] std::string label() const;

  friend bool operator==(const Guideline&, const Guideline&) = default;
};

/// GL1 (monotony template), GL2 (split-robustness template) and the fifteen
/// pattern guidelines GL3..GL17, in that order.
std::vector<Guideline> builtin_catalog();

/// Binds a monotony or split template to a function; the id becomes
/// "GL1(Allgather)" style.
Guideline instantiate(const Guideline& tmpl, const FunctionId& function);

/// Functions whose monotony and split-robustness are tested by default.
std::vector<FunctionId> default_functions();

/// Reads a declarative catalog, one guideline per line:
///
///     pattern Reduce <= Reduce_scatter_block+Gather
///     monotony
///     split
///
/// '#' starts a comment. Patterns identical to a built-in keep the built-in
/// id; others are numbered U1, U2, ... in file order.
std::vector<Guideline> parse_catalog(std::istream& in);

/// Per-function distributions of per-mpirun medians.
struct MedianSeries {
  FunctionId function;
  std::string process_layout;
  std::vector<Bytes> sizes;
  std::vector<stats::SampleVector> medians;

  /// Throws unless sizes are strictly ascending and >= 1 and every size
  /// carries the same number R >= 2 of medians.
  void validate() const;
  [[nodiscard]] std::size_t runs() const {
    return medians.empty() ? 0 : medians.front().size();
  }
  /// Restricts the series to the given sizes (all must be present).
  [[nodiscard]] MedianSeries restrict_to(const std::vector<Bytes>& keep) const;
};

struct Violation {
  Guideline guideline;
  Bytes size = 0;                      // column: m_j for monotony and split
  std::optional<Bytes> smaller_size;   // m_i (monotony and split)
  std::optional<std::size_t> factor;   // k (split only)
  std::optional<double> p_value;       // absent for split
  std::optional<double> alt_p_value;   // KS p-value when both tests ran
  std::string grade;                   // "*", "**", "***" or "tolerance"

  friend bool operator==(const Violation&, const Violation&) = default;
};

enum class CellState { untested, clear, violation };

/// Outcome of one guideline at one message size.
struct Cell {
  Bytes size = 0;
  CellState state = CellState::untested;
  std::optional<double> p_value;
  std::optional<double> alt_p_value;
  std::string grade;
  std::optional<Bytes> smaller_size;   // split: the reported m_i
  std::optional<std::size_t> factor;   // split: k

  friend bool operator==(const Cell&, const Cell&) = default;
};

/// Full per-size outcome of one guideline. Checkers produce these; the
/// violation lists are derived from them.
struct GuidelineResult {
  Guideline guideline;
  std::vector<Cell> cells;
  std::optional<std::string> skipped;  // reason, when the check did not run

  [[nodiscard]] std::vector<Violation> violations() const;
  [[nodiscard]] bool violated() const;
};

enum class PatternTest {
  wilcoxon,  // Wilcoxon decides
  ks,        // KS decides
  both,      // Wilcoxon decides, KS p-value recorded alongside
};

GuidelineResult evaluate_monotony(const MedianSeries& series, double alpha);
GuidelineResult evaluate_split_robustness(const MedianSeries& series,
                                          double tolerance = 0.05);
GuidelineResult evaluate_pattern(const Guideline& guideline,
                                 const MedianSeries& subject,
                                 const MedianSeries& mockup, double alpha,
                                 PatternTest test = PatternTest::wilcoxon);

/// Rank-sum test on each adjacent size pair; a rejection is recorded at the
/// larger size.
std::vector<Violation> check_monotony(const MedianSeries& series, double alpha);

/// Smallest k with k * m_i >= m_j.
std::size_t split_factor(Bytes m_i, Bytes m_j);

/// For each m_j, the largest m_i < m_j with k * T(m_i) < (1 - tolerance) *
/// T(m_j) is reported, where T is the median of the per-run medians.
std::vector<Violation> check_split_robustness(const MedianSeries& series,
                                              double tolerance = 0.05);

/// Per-size one-sided test "subject slower than mock-up". Violations carry
/// the built-in id when the pair is in the catalog, otherwise the label.
std::vector<Violation> check_pattern(const MedianSeries& subject,
                                     const MedianSeries& mockup, double alpha,
                                     PatternTest test = PatternTest::wilcoxon);

struct KindCount {
  std::size_t violated = 0;
  std::size_t total = 0;
  /// "violated/total", e.g. "7/9".
  [[nodiscard]] std::string str() const;
  friend bool operator==(const KindCount&, const KindCount&) = default;
};

struct SummaryCounts {
  KindCount monotony;
  KindCount split;
  KindCount pattern;

  [[nodiscard]] const KindCount& operator[](Kind kind) const;
  /// "m/M, s/S, p/P".
  [[nodiscard]] std::string str() const;
  friend bool operator==(const SummaryCounts&, const SummaryCounts&) = default;
};

/// Once-per-guideline reduction: a tested guideline counts as violated if it
/// has at least one violation at any size.
SummaryCounts summarize(const std::vector<Violation>& violations,
                        const std::vector<Guideline>& guidelines_tested);

}  // namespace pgcheck::guidelines
