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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sstream>

#include "fixtures.hpp"
#include "pgcheck/error.hpp"
#include "pgcheck/report.hpp"

using namespace pgcheck;
using namespace pgcheck::guidelines;
using namespace pgcheck::report;

namespace {

std::size_t count(const std::string& hay, const std::string& needle) {
  std::size_t n = 0;
  for (auto pos = hay.find(needle); pos != std::string::npos; pos = hay.find(needle, pos + needle.size())) ++n;
  return n;
}

Cell clear(Bytes size, double p) { return {size, CellState::clear, p, std::nullopt, "", std::nullopt, std::nullopt}; }

Cell hit(Bytes size, double p) {
  return {size, CellState::violation, p, std::nullopt, stats::significance_grade(p), std::nullopt, std::nullopt};
}

/// A small report touching every row shape: monotony, split, pattern,
/// clean and skipped rows.
ViolationReport sample_report() {
  const auto cat = builtin_catalog();
  std::vector<GuidelineResult> rows;

  GuidelineResult mono{instantiate(cat[0], FunctionId("Bcast")), {}, std::nullopt};
  mono.cells = {{8, CellState::untested, std::nullopt, std::nullopt, "", std::nullopt, std::nullopt},
                clear(16, 0.5), hit(64, 0.004)};
  rows.push_back(mono);

  GuidelineResult split{instantiate(cat[1], FunctionId("Bcast")), {}, std::nullopt};
  split.cells = {{8, CellState::clear, std::nullopt, std::nullopt, "", std::nullopt, std::nullopt},
                 {16, CellState::clear, std::nullopt, std::nullopt, "", std::nullopt, std::nullopt},
                 {64, CellState::violation, std::nullopt, std::nullopt, "tolerance", Bytes{16}, std::size_t{4}}};
  rows.push_back(split);

  GuidelineResult gather{cat[2], {hit(8, 0.0001), hit(16, 0.03), clear(64, 0.2)}, std::nullopt};
  gather.cells[0].alt_p_value = 0.0005;
  rows.push_back(gather);

  rows.push_back({cat[7], {clear(8, 0.9), clear(16, 0.8), clear(64, 0.7)}, std::nullopt});
  rows.push_back({cat[11], {}, std::string("missing data for Reduce+Bcast")});

  return build_report({8, 16, 64}, rows,
                      {{"process_layout", "16x1"}, {"runs", "10"}, {"alpha", "0.05"}});
}

}  // namespace

TEST_CASE("summary is derived once per guideline") {
  const auto r = sample_report();
  CHECK(r.summary.monotony.str() == "1/1");
  CHECK(r.summary.split.str() == "1/1");
  CHECK(r.summary.pattern.str() == "1/2");
  CHECK(r.has_violations());
  CHECK_FALSE(r.watermarked());
}

TEST_CASE("rendering matches the recorded golden files") {
  const auto r = sample_report();
  CHECK(fixtures::matches_golden("report.md", render_report(r, Format::markdown)));
  CHECK(fixtures::matches_golden("report.txt", render_report(r, Format::text)));
  CHECK(fixtures::matches_golden("report.csv", render_report(r, Format::csv)));
}

TEST_CASE("derived mock-ups watermark the report") {
  auto r = sample_report();
  r.provenance.emplace_back(std::string(kMockupSourceKey), std::string(kDerivedMockups));
  CHECK(r.watermarked());
  CHECK(fixtures::matches_golden("report_derived.md", render_report(r, Format::markdown)));
  CHECK(render_report(r, Format::text).find("WARNING") != std::string::npos);
}

TEST_CASE("rendering is a pure function of the report") {
  for (auto f : {Format::text, Format::markdown, Format::csv}) {
    CHECK(render_report(sample_report(), f) == render_report(sample_report(), f));
  }
}

TEST_CASE("empty report") {
  const auto r = build_report({8, 16}, {}, {});
  const auto md = render_report(r, Format::markdown);
  CHECK(md == "# Performance guideline report\n\nno violations\n");
  CHECK(render_report(r, Format::text).find("no violations") != std::string::npos);
  CHECK_FALSE(r.has_violations());
}

TEST_CASE("a single violation yields exactly one bullet") {
  const auto cat = builtin_catalog();
  GuidelineResult g{cat[2], {clear(8, 0.4), hit(16, 0.02)}, std::nullopt};
  const auto r = build_report({8, 16}, {g}, {});
  const auto md = render_report(r, Format::markdown);
  const auto legend_bullets = 1;  // the legend explains the symbol once
  CHECK(count(md, "•") == 1 + legend_bullets);
  CHECK(count(md, "| • * |") == 0);
  CHECK(count(md, "| •* |") == 1);
  CHECK(md.find("no violations") == std::string::npos);
}

TEST_CASE("rows are aligned to the requested columns") {
  const auto cat = builtin_catalog();
  GuidelineResult g{cat[2], {hit(16, 0.02)}, std::nullopt};
  const auto r = build_report({8, 16, 32}, {g}, {});
  REQUIRE(r.rows[0].cells.size() == 3);
  CHECK(r.rows[0].cells[0].state == CellState::untested);
  CHECK(r.rows[0].cells[1].state == CellState::violation);
  CHECK(r.rows[0].cells[2].size == 32);
}

TEST_CASE("raw results round-trip through the csv format") {
  auto r = sample_report();
  r.provenance.emplace_back(std::string(kMockupSourceKey), std::string(kDerivedMockups));
  const auto csv = render_report(r, Format::csv);
  std::istringstream in(csv);
  const auto back = parse_raw_results(in);
  CHECK(back.columns == r.columns);
  CHECK(back.provenance == r.provenance);
  CHECK(back.summary == r.summary);
  CHECK(back.watermarked());
  for (auto f : {Format::text, Format::markdown, Format::csv}) {
    CHECK(render_report(back, f) == render_report(r, f));
  }
}

TEST_CASE("malformed raw results are rejected") {
  std::istringstream none("# columns=8\n");
  CHECK_THROWS_AS(parse_raw_results(none), Error);
  std::istringstream bad_type(
      "# columns=8\nguideline,type,subject,mockup,size,outcome,p_value,alt_p_value,grade,m_i,k,note\n"
      "GL3,x,Gather,Allgather,8,clear,0.5,,,,,\n");
  CHECK_THROWS_WITH_AS(parse_raw_results(bad_type), doctest::Contains("line 3"), Error);
}

TEST_CASE("format names") {
  CHECK(parse_format("md") == Format::markdown);
  CHECK(parse_format("csv") == Format::csv);
  CHECK(to_string(Format::text) == "text");
  CHECK_THROWS_AS(parse_format("html"), Error);
}
