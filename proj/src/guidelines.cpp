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

#include "pgcheck/guidelines.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <string>
#include <utility>

#include "pgcheck/error.hpp"
#include "text_util.hpp"

namespace pgcheck {

FunctionId::FunctionId(std::string name) : name_(std::move(name)) {
  if (name_.empty()) throw Error("function name must not be empty");
  if (is_composite()) {
    for (auto part : detail::split(name_, '+')) {
      if (detail::trim(part).empty()) {
        throw Error("composite '" + name_ + "' has an empty component");
      }
    }
  }
}

bool FunctionId::is_composite() const {
  return name_.find('+') != std::string::npos;
}

std::vector<FunctionId> FunctionId::components() const {
  std::vector<FunctionId> out;
  for (auto part : detail::split(name_, '+')) {
    out.emplace_back(std::string(detail::trim(part)));
  }
  return out;
}

FunctionId composite(const std::vector<FunctionId>& parts) {
  if (parts.size() < 2) throw Error("a composite needs at least two components");
  std::string name;
  for (const auto& p : parts) {
    if (!name.empty()) name += '+';
    name += p.name();
  }
  return FunctionId(name);
}

}  // namespace pgcheck

namespace pgcheck::guidelines {

namespace {

Guideline pattern(std::string id, std::string subject, std::string mockup) {
  return Guideline{Kind::pattern, FunctionId(std::move(subject)),
                   FunctionId(std::move(mockup)), std::move(id)};
}

Guideline monotony_template() {
  return Guideline{Kind::monotony, FunctionId(std::string(kAnyFunction)),
                   std::nullopt, "GL1"};
}

Guideline split_template() {
  return Guideline{Kind::split_robustness,
                   FunctionId(std::string(kAnyFunction)), std::nullopt, "GL2"};
}

void require_same_grid(const MedianSeries& a, const MedianSeries& b) {
  if (a.sizes != b.sizes || a.runs() != b.runs()) {
    throw Error("incomparable series: " + a.function.name() + " and " +
                b.function.name() + " differ in size grid or run count");
  }
}

std::vector<Cell> blank_cells(const MedianSeries& series) {
  std::vector<Cell> cells;
  cells.reserve(series.sizes.size());
  for (auto s : series.sizes) cells.push_back(Cell{s, CellState::untested, {}, {}, {}, {}, {}});
  return cells;
}

}  // namespace

std::string_view to_string(Kind kind) {
  switch (kind) {
    case Kind::monotony: return "monotony";
    case Kind::split_robustness: return "split";
    case Kind::pattern: return "pattern";
  }
  return "unknown";
}

char kind_tag(Kind kind) {
  switch (kind) {
    case Kind::monotony: return 'm';
    case Kind::split_robustness: return 's';
    case Kind::pattern: return 'p';
  }
  return '?';
}

std::string Guideline::label() const {
  if (kind == Kind::pattern && mockup) {
    return subject.name() + " <= " + mockup->name();
  }
  return subject.name();
}

std::vector<Guideline> builtin_catalog() {
  return {
      monotony_template(),
      split_template(),
      pattern("GL3", "Gather", "Allgather"),
      pattern("GL4", "Gather", "Reduce"),
      pattern("GL5", "Allgather", "Alltoall"),
      pattern("GL6", "Allgather", "Allreduce"),
      pattern("GL7", "Scatter", "Bcast"),
      pattern("GL8", "Reduce", "Allreduce"),
      pattern("GL9", "Reduce_scatter", "Allreduce"),
      pattern("GL10", "Bcast", "Scatter+Allgather"),
      pattern("GL11", "Allgather", "Gather+Bcast"),
      pattern("GL12", "Allreduce", "Reduce+Bcast"),
      pattern("GL13", "Allreduce", "Reduce_scatter_block+Allgather"),
      pattern("GL14", "Reduce", "Reduce_scatter_block+Gather"),
      pattern("GL15", "Reduce_scatter_block", "Reduce+Scatter"),
      pattern("GL16", "Scan", "Exscan+Reduce_local"),
      pattern("GL17", "Reduce_scatter", "Reduce+Scatterv"),
  };
}

Guideline instantiate(const Guideline& tmpl, const FunctionId& function) {
  if (tmpl.kind == Kind::pattern) {
    throw Error("pattern guidelines are not templates");
  }
  if (!tmpl.is_template()) return tmpl;
  Guideline g = tmpl;
  g.subject = function;
  g.id = tmpl.id + "(" + function.name() + ")";
  return g;
}

std::vector<FunctionId> default_functions() {
  std::vector<FunctionId> out;
  for (const char* name : {"Allgather", "Allreduce", "Alltoall", "Bcast", "Gather",
                           "Reduce", "Reduce_scatter", "Reduce_scatter_block",
                           "Scatter"}) {
    out.emplace_back(name);
  }
  return out;
}

std::vector<Guideline> parse_catalog(std::istream& in) {
  const auto builtins = builtin_catalog();
  std::vector<Guideline> out;
  std::size_t user_count = 0;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::string_view text = line;
    if (const auto hash = text.find('#'); hash != std::string_view::npos) {
      text = text.substr(0, hash);
    }
    text = detail::trim(text);
    if (text.empty()) continue;

    const auto fail = [&](const std::string& why) {
      return Error("guideline catalog line " + std::to_string(lineno) + ": " + why);
    };
    const auto sp = text.find_first_of(" \t");
    const auto keyword = text.substr(0, sp);
    const auto rest = sp == std::string_view::npos ? std::string_view{}
                                                   : detail::trim(text.substr(sp));

    if (keyword == "monotony" || keyword == "split") {
      Guideline g = keyword == "monotony" ? monotony_template() : split_template();
      if (!rest.empty()) {
        if (rest.find_first_of(" \t+") != std::string_view::npos) {
          throw fail("expected a single function name");
        }
        g = instantiate(g, FunctionId(std::string(rest)));
      }
      out.push_back(std::move(g));
    } else if (keyword == "pattern") {
      const auto le = rest.find("<=");
      if (le == std::string_view::npos) throw fail("expected 'pattern A <= B[+C...]'");
      const auto subject = detail::trim(rest.substr(0, le));
      std::string mock;
      for (auto part : detail::split(rest.substr(le + 2), '+')) {
        part = detail::trim(part);
        if (part.empty()) throw fail("empty mock-up component");
        if (!mock.empty()) mock += '+';
        mock += part;
      }
      if (subject.empty() || subject.find_first_of(" \t+") != std::string_view::npos) {
        throw fail("expected a single subject function");
      }
      Guideline g{Kind::pattern, FunctionId(std::string(subject)), FunctionId(mock), ""};
      const auto builtin = std::find_if(builtins.begin(), builtins.end(), [&](const Guideline& b) {
        return b.kind == Kind::pattern && b.subject == g.subject && b.mockup == g.mockup;
      });
      g.id = builtin != builtins.end() ? builtin->id : "U" + std::to_string(++user_count);
      out.push_back(std::move(g));
    } else {
      throw fail("unknown guideline kind '" + std::string(keyword) + "'");
    }
  }
  return out;
}

void MedianSeries::validate() const {
  if (sizes.size() != medians.size()) {
    throw Error(function.name() + ": sizes and medians differ in length");
  }
  for (std::size_t i = 0; i < sizes.size(); ++i) {
    if (sizes[i] < 1) throw Error(function.name() + ": message sizes must be >= 1 byte");
    if (i > 0 && sizes[i] <= sizes[i - 1]) {
      throw Error(function.name() + ": message sizes must be strictly ascending");
    }
    if (medians[i].size() != runs()) {
      throw Error(function.name() + ": every size must carry the same number of runs");
    }
  }
  if (!sizes.empty() && runs() < 2) {
    throw Error(function.name() + ": at least two runs per size are required");
  }
}

MedianSeries MedianSeries::restrict_to(const std::vector<Bytes>& keep) const {
  MedianSeries out{function, process_layout, {}, {}};
  for (auto s : keep) {
    const auto it = std::find(sizes.begin(), sizes.end(), s);
    if (it == sizes.end()) {
      throw Error(function.name() + ": no data for message size " + std::to_string(s));
    }
    out.sizes.push_back(s);
    out.medians.push_back(medians[static_cast<std::size_t>(it - sizes.begin())]);
  }
  return out;
}

std::vector<Violation> GuidelineResult::violations() const {
  std::vector<Violation> out;
  for (std::size_t i = 0; i < cells.size(); ++i) {
    const auto& c = cells[i];
    if (c.state != CellState::violation) continue;
    Violation v;
    v.guideline = guideline;
    v.size = c.size;
    v.p_value = c.p_value;
    v.alt_p_value = c.alt_p_value;
    v.grade = c.grade;
    if (guideline.kind == Kind::monotony && i > 0) {
      v.smaller_size = cells[i - 1].size;
    }
    if (guideline.kind == Kind::split_robustness) {
      v.smaller_size = c.smaller_size;
      v.factor = c.factor;
    }
    out.push_back(std::move(v));
  }
  return out;
}

bool GuidelineResult::violated() const {
  return std::any_of(cells.begin(), cells.end(),
                     [](const Cell& c) { return c.state == CellState::violation; });
}

GuidelineResult evaluate_monotony(const MedianSeries& series, double alpha) {
  series.validate();
  GuidelineResult result{instantiate(monotony_template(), series.function),
                         blank_cells(series), std::nullopt};
  for (std::size_t j = 1; j < series.sizes.size(); ++j) {
    const auto outcome =
        stats::wilcoxon_rank_sum(series.medians[j - 1], series.medians[j], alpha);
    auto& cell = result.cells[j];
    cell.p_value = outcome.p_value;
    if (outcome.rejected) {
      cell.state = CellState::violation;
      cell.grade = stats::significance_grade(outcome.p_value);
    } else {
      cell.state = CellState::clear;
    }
  }
  return result;
}

std::size_t split_factor(Bytes m_i, Bytes m_j) {
  if (m_i < 1 || m_i >= m_j) {
    throw Error("not a split candidate: " + std::to_string(m_i) +
                " must be positive and below " + std::to_string(m_j));
  }
  return static_cast<std::size_t>(m_j / m_i + (m_j % m_i != 0 ? 1 : 0));
}

GuidelineResult evaluate_split_robustness(const MedianSeries& series,
                                          double tolerance) {
  if (!(tolerance >= 0.0 && tolerance < 1.0)) {
    throw Error("split tolerance must lie in [0,1)");
  }
  series.validate();
  GuidelineResult result{instantiate(split_template(), series.function),
                         blank_cells(series), std::nullopt};
  std::vector<double> typical;
  typical.reserve(series.sizes.size());
  for (const auto& m : series.medians) typical.push_back(stats::median(m));

  for (std::size_t j = 1; j < series.sizes.size(); ++j) {
    auto& cell = result.cells[j];
    cell.state = CellState::clear;
    const double limit = (1.0 - tolerance) * typical[j];
    for (std::size_t i = j; i-- > 0;) {
      const auto k = split_factor(series.sizes[i], series.sizes[j]);
      if (static_cast<double>(k) * typical[i] < limit) {
        cell.state = CellState::violation;
        cell.grade = "tolerance";
        cell.smaller_size = series.sizes[i];
        cell.factor = k;
        break;
      }
    }
  }
  return result;
}

GuidelineResult evaluate_pattern(const Guideline& guideline,
                                 const MedianSeries& subject,
                                 const MedianSeries& mockup, double alpha,
                                 PatternTest test) {
  subject.validate();
  mockup.validate();
  require_same_grid(subject, mockup);
  GuidelineResult result{guideline, blank_cells(subject), std::nullopt};
  for (std::size_t i = 0; i < subject.sizes.size(); ++i) {
    auto& cell = result.cells[i];
    std::optional<stats::TestOutcome> rank_sum;
    std::optional<stats::TestOutcome> ks;
    if (test != PatternTest::ks) {
      rank_sum = stats::wilcoxon_rank_sum(subject.medians[i], mockup.medians[i], alpha);
    }
    if (test != PatternTest::wilcoxon) {
      ks = stats::ks_two_sample(subject.medians[i], mockup.medians[i], alpha);
    }
    const auto& deciding = test == PatternTest::ks ? *ks : *rank_sum;
    cell.p_value = deciding.p_value;
    if (test == PatternTest::both) cell.alt_p_value = ks->p_value;
    if (deciding.rejected) {
      cell.state = CellState::violation;
      cell.grade = stats::significance_grade(deciding.p_value);
    } else {
      cell.state = CellState::clear;
    }
  }
  return result;
}

std::vector<Violation> check_monotony(const MedianSeries& series, double alpha) {
  return evaluate_monotony(series, alpha).violations();
}

std::vector<Violation> check_split_robustness(const MedianSeries& series,
                                              double tolerance) {
  return evaluate_split_robustness(series, tolerance).violations();
}

std::vector<Violation> check_pattern(const MedianSeries& subject,
                                     const MedianSeries& mockup, double alpha,
                                     PatternTest test) {
  Guideline g{Kind::pattern, subject.function, mockup.function, ""};
  for (const auto& b : builtin_catalog()) {
    if (b.kind == Kind::pattern && b.subject == g.subject && b.mockup == g.mockup) {
      g.id = b.id;
    }
  }
  if (g.id.empty()) g.id = g.label();
  return evaluate_pattern(g, subject, mockup, alpha, test).violations();
}

std::string KindCount::str() const {
  return std::to_string(violated) + "/" + std::to_string(total);
}

const KindCount& SummaryCounts::operator[](Kind kind) const {
  switch (kind) {
    case Kind::monotony: return monotony;
    case Kind::split_robustness: return split;
    case Kind::pattern: return pattern;
  }
  throw Error("unknown guideline kind");
}

std::string SummaryCounts::str() const {
  return monotony.str() + ", " + split.str() + ", " + pattern.str();
}

SummaryCounts summarize(const std::vector<Violation>& violations,
                        const std::vector<Guideline>& guidelines_tested) {
  std::set<std::string> tested[3];
  for (const auto& g : guidelines_tested) tested[static_cast<int>(g.kind)].insert(g.id);
  std::set<std::string> hit[3];
  for (const auto& v : violations) {
    const int k = static_cast<int>(v.guideline.kind);
    if (tested[k].count(v.guideline.id)) hit[k].insert(v.guideline.id);
  }
  SummaryCounts out;
  out.monotony = {hit[0].size(), tested[0].size()};
  out.split = {hit[1].size(), tested[1].size()};
  out.pattern = {hit[2].size(), tested[2].size()};
  return out;
}

}  // namespace pgcheck::guidelines
