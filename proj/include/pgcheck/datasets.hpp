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
#include <map>
#include <ostream>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "pgcheck/guidelines.hpp"

namespace pgcheck::datasets {

using guidelines::MedianSeries;

/// One raw run-time observation.
struct TimingSample {
  FunctionId function;
  Bytes msize = 0;
  std::size_t mpirun = 0;
  std::size_t rep = 0;
  double time_us = 0.0;

  friend bool operator==(const TimingSample&, const TimingSample&) = default;
};

struct Dataset {
  std::string process_layout;                 // "NxM", echoed in reports only
  std::vector<TimingSample> samples;
  std::map<std::string, std::string> metadata;

  /// Checks sample invariants and that every (function, msize) has each
  /// mpirun index 0..R-1 with at least one repetition.
  void validate() const;
  /// Sorts samples by (function, msize, mpirun, rep).
  void canonicalize();
};

/// Reads the CSV format `function,msize,mpirun,rep,time_us`. Columns may
/// appear in any order; unknown columns are ignored. Lines starting with '#'
/// are comments; `# key=value` comments become metadata, with the key
/// `process_layout` filling Dataset::process_layout.
Dataset parse_dataset(std::istream& in);

/// Writes the canonical form: metadata comments sorted by key (layout
/// first), the header, then rows in canonical order with shortest
/// round-trip number formatting and LF line endings.
void write_dataset(std::ostream& out, Dataset dataset);

Dataset read_dataset_file(const std::string& path);
void write_dataset_file(const std::string& path, const Dataset& dataset);

/// Combines datasets; process layouts must agree when both are set.
Dataset merge(std::vector<Dataset> parts);

struct HockneyParams {
  double alpha_us = 1.7;      // latency per message
  double beta_us_per_byte = 0.0;
  std::size_t procs = 2;

  void validate() const;
};

enum class Algorithm {
  gather_direct,
  gather_binomial,
  bcast_binomial,
  scatter_binomial,
  reduce_binomial,
  allgather_ring,
  allreduce_ring,
  composite,
};

std::string_view to_string(Algorithm algorithm);
Algorithm parse_algorithm(std::string_view name);

/// Cost model of one collective implementation. Composite models time a
/// sequence of component models end to end.
struct AlgorithmModel {
  FunctionId function;
  Algorithm algorithm = Algorithm::gather_binomial;
  std::vector<AlgorithmModel> components;  // composite only

  static AlgorithmModel simple(std::string function, Algorithm algorithm);
  static AlgorithmModel sequence(std::string function,
                                 std::vector<AlgorithmModel> parts);
};

/// Parses "Function=alg" or "Function=alg1+alg2" (a composite whose parts
/// are named after the function's components when it has them).
AlgorithmModel parse_model(std::string_view spec);

struct HockneyTerms {
  // Number of sequential message latencies; integer so that closed-form
  // checks are exact.
  std::uint64_t latency_steps = 0;
  double latency_us = 0.0;
  double bandwidth_us = 0.0;

  [[nodiscard]] double total() const { return latency_us + bandwidth_us; }
};

/// ceil(log2(p)) for p >= 1.
std::uint64_t ceil_log2(std::uint64_t p);

HockneyTerms hockney_terms(const AlgorithmModel& model,
                           const HockneyParams& params, Bytes msize);

/// Deterministic model time in microseconds (latency + bandwidth terms).
double hockney_time(const AlgorithmModel& model, const HockneyParams& params,
                    Bytes msize);

/// Seeded sub-stream key: FNV-1a over the seed, the function name and the
/// numeric tuple. Independent of generation order.
std::uint64_t stream_key(std::uint64_t seed, std::string_view function,
                         std::uint64_t a, std::uint64_t b);

/// Lognormal run-time source for one (model, size, mpirun). Each draw is
/// model_time * run_offset * exp(N(0, sigma^2)); the run offset
/// exp(N(0, sigma^2)) is fixed per (seed, mpirun).
class SyntheticSource {
 public:
  SyntheticSource(const AlgorithmModel& model, const HockneyParams& params,
                  Bytes msize, std::size_t mpirun, double noise_sigma,
                  std::uint64_t seed);
  double operator()();

 private:
  double base_us_;
  double noise_sigma_;
  std::mt19937_64 rng_;
  std::normal_distribution<double> normal_{0.0, 1.0};
};

/// Multiplicative offset shared by every measurement of one mpirun.
double mpirun_offset(std::size_t mpirun, double noise_sigma, std::uint64_t seed);

struct SyntheticSpec {
  std::vector<AlgorithmModel> models;
  HockneyParams params;
  std::vector<Bytes> sizes;
  std::size_t runs = 10;
  std::size_t reps = 100;
  double noise_sigma = 0.05;
  std::uint64_t seed = 1;
};

Dataset generate_synthetic(const SyntheticSpec& spec);

/// Per function, the median of each (size, mpirun) cell arranged as a
/// MedianSeries over that function's ascending size grid.
std::map<FunctionId, MedianSeries> reduce_to_medians(const Dataset& dataset);

/// Mock-up series built as the per-mpirun sum of component medians, for
/// datasets without an end-to-end composite measurement. All components
/// must share size grid and run count.
MedianSeries derive_composite_series(const FunctionId& mockup,
                                     const std::map<FunctionId, MedianSeries>& series);

}  // namespace pgcheck::datasets
