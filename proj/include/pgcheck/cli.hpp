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

#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "pgcheck/datasets.hpp"
#include "pgcheck/guidelines.hpp"
#include "pgcheck/nrep.hpp"
#include "pgcheck/report.hpp"

namespace pgcheck::cli {

inline constexpr int kExitClean = 0;
inline constexpr int kExitViolations = 1;
inline constexpr int kExitError = 2;

struct RunConfig {
  std::vector<FunctionId> calls;     // empty: every measured non-composite function
  std::vector<Bytes> msizes;         // empty: every measured size
  nrep::NrepConfig nrep;
  std::optional<std::size_t> runs;   // expected R, checked against the data
  double alpha = stats::kDefaultAlpha;
  double tolerance = 0.05;
  std::vector<guidelines::Guideline> guidelines = guidelines::builtin_catalog();
  report::Format format = report::Format::text;
  guidelines::PatternTest pattern_test = guidelines::PatternTest::wilcoxon;
  bool derive_mockups = false;
};

/// Accepts "MPI_Reduce,Bcast" style lists; the MPI_ prefix is dropped.
std::vector<FunctionId> parse_calls_list(std::string_view list);
std::vector<Bytes> parse_msizes_list(std::string_view list);

/// Default message-size grid, 1 B to 100 KiB.
std::vector<Bytes> table_size_grid();

/// Named synthetic setups. "gather-direct-32" and "gather-binomial-32" model
/// a 32-process Gather (direct or binomial tree) next to an Allgather built
/// from a binomial gather followed by a binomial broadcast.
datasets::SyntheticSpec preset(std::string_view name);

/// Runs every selected guideline over the dataset. Checks run concurrently
/// and are joined in catalog order.
report::ViolationReport analyze(const datasets::Dataset& dataset,
                                const RunConfig& config);

/// Entry point shared by the executable and the tests; args exclude the
/// program name. Returns the process exit status.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace pgcheck::cli
