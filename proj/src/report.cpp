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

#include "pgcheck/report.hpp"

#include <algorithm>
#include <sstream>

#include "pgcheck/error.hpp"
#include "text_util.hpp"

namespace pgcheck::report {

using guidelines::Cell;
using guidelines::CellState;
using guidelines::Guideline;
using guidelines::GuidelineResult;
using guidelines::Kind;

namespace {

constexpr std::string_view kBullet = "•";
constexpr std::string_view kColumnsKey = "columns";
constexpr std::string_view kCsvHeader =
    "guideline,type,subject,mockup,size,outcome,p_value,alt_p_value,grade,m_i,k,note";

constexpr std::string_view kLegend =
    "• violation; * p<0.05, ** p<0.01, *** p<0.001 (one-sided rank-sum or KS "
    "test); split-robustness violations are tolerance-based and carry no asterisks";
constexpr std::string_view kWatermark =
    "WARNING: mock-up series derived from summed component medians, not measured "
    "end to end";

std::string cell_mark(const Cell& c) {
  if (c.state != CellState::violation) return "";
  std::string mark(kBullet);
  if (c.grade != "tolerance") mark += c.grade;
  return mark;
}

std::string_view outcome_name(CellState s) {
  switch (s) {
    case CellState::untested: return "untested";
    case CellState::clear: return "clear";
    case CellState::violation: return "violation";
  }
  return "untested";
}

// Column count of UTF-8 text; every code point is one column here.
std::size_t display_width(std::string_view s) {
  return static_cast<std::size_t>(std::count_if(
      s.begin(), s.end(), [](char c) { return (static_cast<unsigned char>(c) & 0xC0) != 0x80; }));
}

std::string pad(std::string_view s, std::size_t width) {
  std::string out(s);
  out.append(width - std::min(width, display_width(s)), ' ');
  return out;
}

std::string sanitize(std::string_view s) {
  std::string out(s);
  std::replace(out.begin(), out.end(), ',', ';');
  std::replace(out.begin(), out.end(), '\n', ' ');
  std::replace(out.begin(), out.end(), '\r', ' ');
  return out;
}

std::string opt_number(const std::optional<double>& v) {
  return v ? detail::format_double(*v) : std::string();
}

template <typename T>
std::string opt_integer(const std::optional<T>& v) {
  return v ? std::to_string(*v) : std::string();
}

std::vector<std::string> summary_lines(const guidelines::SummaryCounts& s) {
  return {std::string("m ") + s.monotony.str(), std::string("s ") + s.split.str(),
          std::string("p ") + s.pattern.str()};
}

std::string render_markdown(const ViolationReport& r) {
  std::ostringstream out;
  out << "# Performance guideline report\n\n";
  if (r.watermarked()) out << "**" << kWatermark << "**\n\n";
  for (const auto& [k, v] : r.provenance) out << "- " << k << ": " << v << '\n';
  if (!r.provenance.empty()) out << '\n';
  if (r.rows.empty()) {
    out << "no violations\n";
    return out.str();
  }

  out << "| type | guideline |";
  for (auto c : r.columns) out << ' ' << c << " |";
  out << "\n|:-:|:--|";
  for (std::size_t i = 0; i < r.columns.size(); ++i) out << ":-:|";
  out << '\n';
  for (const auto& row : r.rows) {
    out << "| " << guidelines::kind_tag(row.guideline.kind) << " | "
        << row.guideline.label() << " |";
    for (std::size_t i = 0; i < r.columns.size(); ++i) {
      if (row.skipped) {
        out << (i == 0 ? " skipped: " + *row.skipped + " |" : " |");
        continue;
      }
      const auto mark = cell_mark(row.cells[i]);
      out << (mark.empty() ? " |" : " " + mark + " |");
    }
    if (r.columns.empty() && row.skipped) out << " skipped: " << *row.skipped << " |";
    out << '\n';
  }
  out << "\n" << kLegend << "\n\n## Summary\n\n| type | violated |\n|:-:|--:|\n";
  out << "| m | " << r.summary.monotony.str() << " |\n";
  out << "| s | " << r.summary.split.str() << " |\n";
  out << "| p | " << r.summary.pattern.str() << " |\n";
  if (!r.has_violations()) out << "\nno violations\n";
  return out.str();
}

std::string render_text(const ViolationReport& r) {
  std::ostringstream out;
  out << "Performance guideline report\n";
  if (r.watermarked()) out << kWatermark << '\n';
  for (const auto& [k, v] : r.provenance) out << k << ": " << v << '\n';
  out << '\n';
  if (r.rows.empty()) {
    out << "no violations\n";
    return out.str();
  }

  std::vector<std::vector<std::string>> table;
  std::vector<std::string> header{"type", "guideline"};
  for (auto c : r.columns) header.push_back(std::to_string(c));
  table.push_back(header);
  std::vector<std::optional<std::string>> skipped{std::nullopt};
  for (const auto& row : r.rows) {
    std::vector<std::string> line{std::string(1, guidelines::kind_tag(row.guideline.kind)),
                                  row.guideline.label()};
    for (std::size_t i = 0; i < r.columns.size(); ++i) {
      line.push_back(row.skipped ? std::string() : cell_mark(row.cells[i]));
    }
    table.push_back(std::move(line));
    skipped.push_back(row.skipped);
  }
  std::vector<std::size_t> width(header.size(), 0);
  for (const auto& line : table) {
    for (std::size_t i = 0; i < line.size(); ++i) {
      width[i] = std::max(width[i], display_width(line[i]));
    }
  }
  for (std::size_t t = 0; t < table.size(); ++t) {
    std::string text;
    const std::size_t shown = skipped[t] ? 2 : table[t].size();
    for (std::size_t i = 0; i < shown; ++i) {
      if (i > 0) text += "  ";
      text += pad(table[t][i], width[i]);
    }
    if (skipped[t]) text += "  skipped: " + *skipped[t];
    while (!text.empty() && text.back() == ' ') text.pop_back();
    out << text << '\n';
  }
  out << '\n' << kLegend << "\n\nsummary (violated/tested):";
  for (const auto& s : summary_lines(r.summary)) out << "  " << s;
  out << '\n';
  if (!r.has_violations()) out << "no violations\n";
  return out.str();
}

std::string render_csv(const ViolationReport& r) {
  std::ostringstream out;
  out << "# " << kColumnsKey << '=';
  for (std::size_t i = 0; i < r.columns.size(); ++i) {
    out << (i ? ";" : "") << r.columns[i];
  }
  out << '\n';
  for (const auto& [k, v] : r.provenance) out << "# " << k << '=' << sanitize(v) << '\n';
  out << kCsvHeader << '\n';
  for (const auto& row : r.rows) {
    const auto& g = row.guideline;
    const std::string prefix = g.id + ',' + guidelines::kind_tag(g.kind) + ',' +
                               g.subject.name() + ',' + (g.mockup ? g.mockup->name() : "") +
                               ',';
    if (row.skipped) {
      out << prefix << ",skipped,,,,,," << sanitize(*row.skipped) << '\n';
      continue;
    }
    for (const auto& c : row.cells) {
      out << prefix << c.size << ',' << outcome_name(c.state) << ',' << opt_number(c.p_value)
          << ',' << opt_number(c.alt_p_value) << ',' << c.grade << ','
          << opt_integer(c.smaller_size) << ',' << opt_integer(c.factor) << ",\n";
    }
  }
  return out.str();
}

Kind kind_from_tag(std::string_view tag) {
  if (tag == "m") return Kind::monotony;
  if (tag == "s") return Kind::split_robustness;
  if (tag == "p") return Kind::pattern;
  throw Error("unknown guideline type '" + std::string(tag) + "'");
}

}  // namespace

std::string_view to_string(Format format) {
  switch (format) {
    case Format::text: return "text";
    case Format::markdown: return "markdown";
    case Format::csv: return "csv";
  }
  return "text";
}

Format parse_format(std::string_view name) {
  if (name == "text") return Format::text;
  if (name == "markdown" || name == "md") return Format::markdown;
  if (name == "csv") return Format::csv;
  throw Error("unknown output format '" + std::string(name) + "'");
}

bool ViolationReport::has_violations() const {
  return std::any_of(rows.begin(), rows.end(),
                     [](const GuidelineResult& r) { return r.violated(); });
}

bool ViolationReport::watermarked() const {
  return std::any_of(provenance.begin(), provenance.end(), [](const auto& kv) {
    return kv.first == kMockupSourceKey && kv.second == kDerivedMockups;
  });
}

ViolationReport build_report(std::vector<Bytes> columns,
                             std::vector<GuidelineResult> rows,
                             std::vector<std::pair<std::string, std::string>> provenance) {
  ViolationReport r;
  r.columns = std::move(columns);
  r.provenance = std::move(provenance);
  std::vector<Guideline> tested;
  std::vector<guidelines::Violation> violations;
  for (auto& row : rows) {
    std::vector<Cell> aligned;
    aligned.reserve(r.columns.size());
    for (auto size : r.columns) {
      const auto it = std::find_if(row.cells.begin(), row.cells.end(),
                                   [size](const Cell& c) { return c.size == size; });
      aligned.push_back(it != row.cells.end() ? *it : Cell{size, CellState::untested, {}, {}, {}, {}, {}});
    }
    row.cells = std::move(aligned);
    if (row.skipped) {
      row.cells.clear();
      continue;
    }
    tested.push_back(row.guideline);
    const auto v = row.violations();
    violations.insert(violations.end(), v.begin(), v.end());
  }
  r.rows = std::move(rows);
  r.summary = guidelines::summarize(violations, tested);
  return r;
}

std::string render_report(const ViolationReport& report, Format format) {
  switch (format) {
    case Format::text: return render_text(report);
    case Format::markdown: return render_markdown(report);
    case Format::csv: return render_csv(report);
  }
  return render_text(report);
}

ViolationReport parse_raw_results(std::istream& in) {
  std::vector<Bytes> columns;
  std::vector<std::pair<std::string, std::string>> provenance;
  std::vector<GuidelineResult> rows;
  bool have_header = false;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const auto fail = [&](const std::string& why) {
      return Error("raw results line " + std::to_string(lineno) + ": " + why);
    };
    if (line.empty()) continue;
    if (line.front() == '#') {
      const std::string_view body = detail::trim(std::string_view(line).substr(1));
      const auto eq = body.find('=');
      if (eq == std::string_view::npos) continue;
      const std::string key(body.substr(0, eq));
      const std::string value(body.substr(eq + 1));
      if (key == kColumnsKey) {
        if (!value.empty()) {
          for (auto c : detail::split(value, ';')) {
            const auto size = detail::parse_number<Bytes>(c);
            if (!size) throw fail("bad column size '" + std::string(c) + "'");
            columns.push_back(*size);
          }
        }
      } else {
        provenance.emplace_back(key, value);
      }
      continue;
    }
    if (!have_header) {
      if (line != kCsvHeader) throw fail("unexpected header");
      have_header = true;
      continue;
    }
    const auto f = detail::split(line, ',');
    if (f.size() != 12) throw fail("expected 12 fields");
    Guideline g;
    g.id = std::string(f[0]);
    try {
      g.kind = kind_from_tag(f[1]);
      g.subject = FunctionId(std::string(f[2]));
      if (!f[3].empty()) g.mockup = FunctionId(std::string(f[3]));
    } catch (const Error& e) {
      throw fail(e.what());
    }
    if (rows.empty() || rows.back().guideline != g) {
      rows.push_back(GuidelineResult{g, {}, std::nullopt});
    }
    auto& row = rows.back();
    if (f[5] == "skipped") {
      row.skipped = std::string(f[11]);
      continue;
    }
    Cell c;
    const auto size = detail::parse_number<Bytes>(f[4]);
    if (!size) throw fail("bad size");
    c.size = *size;
    if (f[5] == "clear") {
      c.state = CellState::clear;
    } else if (f[5] == "violation") {
      c.state = CellState::violation;
    } else if (f[5] == "untested") {
      c.state = CellState::untested;
    } else {
      throw fail("unknown outcome '" + std::string(f[5]) + "'");
    }
    const auto field = [&]<typename T>(std::string_view text, std::optional<T>& dst) {
      if (text.empty()) return;
      dst = detail::parse_number<T>(text);
      if (!dst) throw fail("bad number '" + std::string(text) + "'");
    };
    field(f[6], c.p_value);
    field(f[7], c.alt_p_value);
    c.grade = std::string(f[8]);
    field(f[9], c.smaller_size);
    field(f[10], c.factor);
    row.cells.push_back(std::move(c));
  }
  if (!have_header) throw Error("raw results: missing header");
  return build_report(std::move(columns), std::move(rows), std::move(provenance));
}

}  // namespace pgcheck::report
