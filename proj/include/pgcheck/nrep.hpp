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

#include <array>
#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace pgcheck::nrep {

/// Stopping metrics for repetition-count prediction.
enum class Metric { rse, cov_mean, cov_median };

std::string_view to_string(Metric metric);
Metric parse_metric(std::string_view name);

struct MethodSpec {
  Metric metric = Metric::rse;
  double threshold = 0.0;
  // Counted in checkpoints, not repetitions. Ignored for rse.
  std::size_t window = 0;
};

struct NrepConfig {
  std::size_t min = 20;
  std::size_t max = 1000;
  std::size_t step = 10;
  std::vector<MethodSpec> methods;

  /// Throws pgcheck::Error if the configuration is unusable.
  void validate() const;

  /// Repetition counts at which metrics are evaluated: min, min+step, ...
  /// and always max.
  [[nodiscard]] std::vector<std::size_t> checkpoints() const;
};

struct Checkpoint {
  std::size_t n = 0;
  // One entry per configured method, in config order; empty while a COV
  // window is not yet filled.
  std::vector<std::optional<double>> values;
  bool satisfied = false;
};

struct NrepDecision {
  std::size_t nrep = 0;
  // True when every metric fell below its threshold at some checkpoint,
  // including a checkpoint at max itself.
  bool stopped_early = false;
  std::vector<Checkpoint> trace;
};

/// Incremental stopping-rule evaluation. Observations are fed one at a time;
/// `add` returns true once a decision has been reached, after which further
/// observations are ignored. Replay and live measurement share this path.
class NrepPredictor {
 public:
  explicit NrepPredictor(NrepConfig config);

  bool add(double time_us);
  [[nodiscard]] bool done() const { return decision_.has_value(); }
  [[nodiscard]] std::size_t observed() const { return timings_.size(); }
  /// Throws if no decision has been reached yet.
  [[nodiscard]] const NrepDecision& decision() const;

 private:
  void evaluate();

  NrepConfig config_;
  std::vector<std::size_t> checkpoints_;
  std::size_t next_checkpoint_ = 0;
  std::vector<double> timings_;
  std::vector<double> running_means_;
  std::vector<double> running_medians_;
  std::vector<Checkpoint> trace_;
  std::optional<NrepDecision> decision_;
};

/// Source of fresh run-time observations for live prediction.
using TimingSource = std::function<double()>;

/// Replay mode: throws if the stream runs out before a decision.
NrepDecision predict_nrep(std::span<const double> timings,
                          const NrepConfig& config);

/// Live mode: pulls observations lazily until a decision is reached.
NrepDecision predict_nrep(const TimingSource& source, const NrepConfig& config);

/// Three independent predictions; the largest repetition count wins.
std::size_t predict_nrep_multi(
    const std::array<std::span<const double>, 3>& streams,
    const NrepConfig& config);

/// Parses "min=<i>,max=<i>,step=<i>" into the count fields of `config`.
void parse_rep_prediction(std::string_view spec, NrepConfig& config);

/// Builds the method list from positional comma lists as accepted on the
/// command line: methods "rse,cov_mean", thresholds "0.025,0.01", windows
/// "-,20" ('-' or empty for metrics without a window).
std::vector<MethodSpec> parse_methods(std::string_view methods,
                                      std::string_view thresholds,
                                      std::string_view windows);

}  // namespace pgcheck::nrep
