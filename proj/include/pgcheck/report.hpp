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

#include <istream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "pgcheck/guidelines.hpp"

namespace pgcheck::report {

enum class Format { text, markdown, csv };

std::string_view to_string(Format format);
Format parse_format(std::string_view name);

/// Provenance key whose presence marks reports that used mock-up series
/// derived from component medians.
inline constexpr std::string_view kMockupSourceKey = "mockup_source";
inline constexpr std::string_view kDerivedMockups = "derived-sum-of-component-medians";

/// Guideline x message-size matrix plus the once-per-guideline summary.
struct ViolationReport {
  std::vector<Bytes> columns;
  std::vector<guidelines::GuidelineResult> rows;
  guidelines::SummaryCounts summary;
  std::vector<std::pair<std::string, std::string>> provenance;

  [[nodiscard]] bool has_violations() const;
  [[nodiscard]] bool watermarked() const;
};

/// Aligns every row to `columns` (missing sizes become untested cells) and
/// derives the summary from the rows. Skipped rows are not counted as tested.
ViolationReport build_report(std::vector<Bytes> columns,
                             std::vector<guidelines::GuidelineResult> rows,
                             std::vector<std::pair<std::string, std::string>> provenance);

/// Deterministic rendering. The csv format is also the raw-results format
/// read back by parse_raw_results.
std::string render_report(const ViolationReport& report, Format format);

ViolationReport parse_raw_results(std::istream& in);

}  // namespace pgcheck::report
