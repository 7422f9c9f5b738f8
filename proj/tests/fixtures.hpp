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

// Shared test fixtures.

#pragma once

#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "pgcheck/guidelines.hpp"
#include "pgcheck/nrep.hpp"

namespace fixtures {

inline std::string data_path(const std::string& name) {
  return std::string(PGCHECK_TEST_DATA_DIR) + "/" + name;
}

inline std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

/// Compares `actual` with tests/data/golden/<name>. With PGCHECK_UPDATE_GOLDEN
/// set in the environment the file is rewritten instead.
inline bool matches_golden(const std::string& name, const std::string& actual) {
  const std::string path = data_path("golden/" + name);
  if (std::getenv("PGCHECK_UPDATE_GOLDEN") != nullptr) {
    std::ofstream(path, std::ios::binary) << actual;
    return true;
  }
  return std::filesystem::exists(path) && slurp(path) == actual;
}

inline std::filesystem::path scratch_dir(const std::string& tag) {
  auto dir = std::filesystem::temp_directory_path() / ("pgcheck_test_" + tag);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

inline std::vector<double> constant_stream(std::size_t n = 1000, double v = 7.0) {
  return std::vector<double>(n, v);
}

inline std::vector<double> alternating_stream(std::size_t n = 1000) {
  std::vector<double> s(n);
  for (std::size_t i = 0; i < n; ++i) s[i] = i % 2 == 0 ? 1.0 : 100.0;
  return s;
}

// Alternating 100 +/- 22.85 us. With min=20, step=1 the RSE over the first
// n observations first drops below 0.025 at n=85 (0.02508 at n=84, 0.02486
// at n=85) while the COV of the last 20 running means is ~0.0016.
inline constexpr double kSwing = 22.85;

inline std::vector<double> swing_stream(std::size_t n = 1000) {
  std::vector<double> s(n);
  for (std::size_t i = 0; i < n; ++i) s[i] = i % 2 == 0 ? 100.0 + kSwing : 100.0 - kSwing;
  return s;
}

inline pgcheck::nrep::NrepConfig swing_config() {
  using pgcheck::nrep::Metric;
  pgcheck::nrep::NrepConfig c;
  c.min = 20;
  c.max = 1000;
  c.step = 1;
  c.methods = {{Metric::rse, 0.025, 0}, {Metric::cov_mean, 0.01, 20}};
  return c;
}

inline pgcheck::nrep::NrepConfig rse_config(double threshold = 0.025) {
  pgcheck::nrep::NrepConfig c;
  c.min = 20;
  c.max = 1000;
  c.step = 10;
  c.methods = {{pgcheck::nrep::Metric::rse, threshold, 0}};
  return c;
}

/// Series whose R medians at size i are base(i) * (1 + 0.001 * r).
template <typename F>
pgcheck::guidelines::MedianSeries make_series(const std::string& name,
                                              const std::vector<pgcheck::Bytes>& sizes,
                                              std::size_t runs, F base) {
  pgcheck::guidelines::MedianSeries s{pgcheck::FunctionId(name), "16x1", sizes, {}};
  for (std::size_t i = 0; i < sizes.size(); ++i) {
    std::vector<double> v;
    for (std::size_t r = 0; r < runs; ++r) v.push_back(base(i) * (1.0 + 0.001 * static_cast<double>(r)));
    s.medians.emplace_back(v);
  }
  return s;
}

/// Nine monotony series over {8, 16, 32, 64}. Seven of them dip at one or
/// more sizes, two grow strictly. The dips are clear-cut: every per-run
/// median at the larger size is below every one at the smaller size.
inline std::vector<pgcheck::guidelines::MedianSeries> seven_of_nine_series() {
  const std::vector<pgcheck::Bytes> sizes{8, 16, 32, 64};
  // Multipliers per size; values < previous produce a dip.
  const std::vector<std::vector<double>> shapes{
      {10, 8, 12, 14},   // Allgather: dip at 16
      {10, 12, 9, 14},   // Allreduce: dip at 32
      {10, 12, 14, 16},  // Alltoall: clean
      {10, 8, 7, 6},     // Bcast: dips at 16, 32, 64
      {10, 12, 14, 11},  // Gather: dip at 64
      {10, 9, 12, 10},   // Reduce: dips at 16, 64
      {10, 11, 12, 13},  // Reduce_scatter: clean
      {10, 8, 12, 14},   // Reduce_scatter_block: dip at 16
      {10, 12, 9, 14},   // Scatter: dip at 32
  };
  std::vector<pgcheck::guidelines::MedianSeries> out;
  const auto names = pgcheck::guidelines::default_functions();
  for (std::size_t f = 0; f < names.size(); ++f) {
    const auto& shape = shapes[f];
    out.push_back(make_series(names[f].name(), sizes, 10, [&](std::size_t i) { return shape[i]; }));
  }
  return out;
}

}  // namespace fixtures
