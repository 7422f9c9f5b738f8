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

#include "pgcheck/datasets.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>
#include <tuple>

#include "pgcheck/error.hpp"
#include "pgcheck/stats.hpp"
#include "text_util.hpp"

namespace pgcheck::datasets {

namespace {

constexpr std::array<std::string_view, 5> kColumns = {"function", "msize", "mpirun",
                                                      "rep", "time_us"};
constexpr std::string_view kLayoutKey = "process_layout";

auto sample_key(const TimingSample& s) {
  return std::tie(s.function, s.msize, s.mpirun, s.rep);
}

std::string strip_cr(std::string line) {
  if (!line.empty() && line.back() == '\r') line.pop_back();
  return line;
}

FunctionId component_function(Algorithm a) {
  switch (a) {
    case Algorithm::gather_direct:
    case Algorithm::gather_binomial: return FunctionId("Gather");
    case Algorithm::bcast_binomial: return FunctionId("Bcast");
    case Algorithm::scatter_binomial: return FunctionId("Scatter");
    case Algorithm::reduce_binomial: return FunctionId("Reduce");
    case Algorithm::allgather_ring: return FunctionId("Allgather");
    case Algorithm::allreduce_ring: return FunctionId("Allreduce");
    case Algorithm::composite: break;
  }
  throw Error("composite has no default function");
}

}  // namespace

void Dataset::validate() const {
  std::map<std::pair<FunctionId, Bytes>, std::set<std::size_t>> runs;
  std::set<std::tuple<FunctionId, Bytes, std::size_t, std::size_t>> seen;
  for (const auto& s : samples) {
    if (s.function.name().empty()) throw Error("sample without function name");
    if (s.msize < 1) throw Error("message sizes must be >= 1 byte");
    if (!std::isfinite(s.time_us) || s.time_us <= 0.0) {
      throw Error("run-times must be strictly positive and finite");
    }
    if (!seen.emplace(s.function, s.msize, s.mpirun, s.rep).second) {
      throw Error("duplicate sample for " + s.function.name() + " msize " +
                  std::to_string(s.msize) + " mpirun " + std::to_string(s.mpirun) +
                  " rep " + std::to_string(s.rep));
    }
    runs[{s.function, s.msize}].insert(s.mpirun);
  }
  for (const auto& [key, ids] : runs) {
    // ids is ordered; coverage of 0..R-1 means the largest id is R-1
    if (*ids.rbegin() + 1 != ids.size()) {
      throw Error("incomplete run matrix: " + key.first.name() + " msize " +
                  std::to_string(key.second) + " is missing mpirun indices");
    }
  }
}

void Dataset::canonicalize() {
  std::sort(samples.begin(), samples.end(),
            [](const TimingSample& a, const TimingSample& b) {
              return sample_key(a) < sample_key(b);
            });
}

Dataset parse_dataset(std::istream& in) {
  Dataset ds;
  std::string raw;
  std::size_t lineno = 0;
  std::array<std::size_t, kColumns.size()> column_at{};
  std::size_t width = 0;
  bool have_header = false;

  while (std::getline(in, raw)) {
    ++lineno;
    const std::string line = strip_cr(std::move(raw));
    const auto text = detail::trim(line);
    if (text.empty()) continue;
    const auto fail = [&](const std::string& why) {
      return Error("line " + std::to_string(lineno) + ": " + why);
    };

    if (text.front() == '#') {
      const auto body = detail::trim(text.substr(1));
      const auto eq = body.find('=');
      if (eq == std::string_view::npos) continue;
      const std::string key(detail::trim(body.substr(0, eq)));
      const std::string value(detail::trim(body.substr(eq + 1)));
      if (key.empty()) continue;
      if (key == kLayoutKey) {
        ds.process_layout = value;
      } else {
        ds.metadata[key] = value;
      }
      continue;
    }

    const auto fields = detail::split(text, ',');
    if (!have_header) {
      column_at.fill(fields.size());
      for (std::size_t i = 0; i < fields.size(); ++i) {
        const auto name = detail::trim(fields[i]);
        for (std::size_t c = 0; c < kColumns.size(); ++c) {
          if (name == kColumns[c]) column_at[c] = i;
        }
      }
      for (std::size_t c = 0; c < kColumns.size(); ++c) {
        if (column_at[c] == fields.size()) {
          throw fail("header lacks column '" + std::string(kColumns[c]) + "'");
        }
      }
      width = fields.size();
      have_header = true;
      continue;
    }

    if (fields.size() != width) {
      throw fail("expected " + std::to_string(width) + " fields, found " +
                 std::to_string(fields.size()));
    }
    TimingSample s;
    const auto function = detail::trim(fields[column_at[0]]);
    if (function.empty()) throw fail("empty function name");
    try {
      s.function = FunctionId(std::string(function));
    } catch (const Error& e) {
      throw fail(e.what());
    }
    const auto msize = detail::parse_number<Bytes>(fields[column_at[1]]);
    const auto mpirun = detail::parse_number<std::size_t>(fields[column_at[2]]);
    const auto rep = detail::parse_number<std::size_t>(fields[column_at[3]]);
    const auto time = detail::parse_number<double>(fields[column_at[4]]);
    if (!msize || *msize < 1) throw fail("msize must be a positive integer");
    if (!mpirun) throw fail("mpirun must be a non-negative integer");
    if (!rep) throw fail("rep must be a non-negative integer");
    if (!time || !std::isfinite(*time) || *time <= 0.0) {
      throw fail("time_us must be a positive finite number");
    }
    s.msize = *msize;
    s.mpirun = *mpirun;
    s.rep = *rep;
    s.time_us = *time;
    ds.samples.push_back(std::move(s));
  }
  if (!have_header) throw Error("missing header line");
  ds.validate();
  return ds;
}

void write_dataset(std::ostream& out, Dataset dataset) {
  dataset.canonicalize();
  if (!dataset.process_layout.empty()) {
    out << "# " << kLayoutKey << '=' << dataset.process_layout << '\n';
  }
  for (const auto& [k, v] : dataset.metadata) out << "# " << k << '=' << v << '\n';
  out << "function,msize,mpirun,rep,time_us\n";
  for (const auto& s : dataset.samples) {
    out << s.function.name() << ',' << s.msize << ',' << s.mpirun << ',' << s.rep
        << ',' << detail::format_double(s.time_us) << '\n';
  }
}

Dataset read_dataset_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open dataset '" + path + "'");
  try {
    return parse_dataset(in);
  } catch (const Error& e) {
    throw Error(path + ": " + e.what());
  }
}

void write_dataset_file(const std::string& path, const Dataset& dataset) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write dataset '" + path + "'");
  write_dataset(out, dataset);
  if (!out) throw Error("write to '" + path + "' failed");
}

Dataset merge(std::vector<Dataset> parts) {
  Dataset out;
  for (auto& p : parts) {
    if (!p.process_layout.empty()) {
      if (!out.process_layout.empty() && out.process_layout != p.process_layout) {
        throw Error("cannot merge datasets with process layouts " + out.process_layout +
                    " and " + p.process_layout);
      }
      out.process_layout = p.process_layout;
    }
    for (auto& [k, v] : p.metadata) out.metadata.insert_or_assign(k, v);
    out.samples.insert(out.samples.end(), std::make_move_iterator(p.samples.begin()),
                       std::make_move_iterator(p.samples.end()));
  }
  out.validate();
  return out;
}

void HockneyParams::validate() const {
  if (!(alpha_us > 0.0) || !std::isfinite(alpha_us)) {
    throw Error("hockney: latency must be positive");
  }
  if (!(beta_us_per_byte >= 0.0) || !std::isfinite(beta_us_per_byte)) {
    throw Error("hockney: per-byte time must be non-negative");
  }
  if (procs < 2) throw Error("hockney: at least two processes are required");
}

std::string_view to_string(Algorithm algorithm) {
  switch (algorithm) {
    case Algorithm::gather_direct: return "gather_direct";
    case Algorithm::gather_binomial: return "gather_binomial";
    case Algorithm::bcast_binomial: return "bcast_binomial";
    case Algorithm::scatter_binomial: return "scatter_binomial";
    case Algorithm::reduce_binomial: return "reduce_binomial";
    case Algorithm::allgather_ring: return "allgather_ring";
    case Algorithm::allreduce_ring: return "allreduce_ring";
    case Algorithm::composite: return "composite";
  }
  return "unknown";
}

Algorithm parse_algorithm(std::string_view name) {
  name = detail::trim(name);
  for (auto a : {Algorithm::gather_direct, Algorithm::gather_binomial,
                 Algorithm::bcast_binomial, Algorithm::scatter_binomial,
                 Algorithm::reduce_binomial, Algorithm::allgather_ring,
                 Algorithm::allreduce_ring}) {
    if (to_string(a) == name) return a;
  }
  throw Error("unknown algorithm '" + std::string(name) + "'");
}

AlgorithmModel AlgorithmModel::simple(std::string function, Algorithm algorithm) {
  if (algorithm == Algorithm::composite) {
    throw Error("use AlgorithmModel::sequence for composites");
  }
  return AlgorithmModel{FunctionId(std::move(function)), algorithm, {}};
}

AlgorithmModel AlgorithmModel::sequence(std::string function,
                                        std::vector<AlgorithmModel> parts) {
  if (parts.empty()) throw Error("composite model needs at least one component");
  return AlgorithmModel{FunctionId(std::move(function)), Algorithm::composite,
                        std::move(parts)};
}

AlgorithmModel parse_model(std::string_view spec) {
  const auto eq = spec.find('=');
  if (eq == std::string_view::npos) {
    throw Error("model spec '" + std::string(spec) + "' must be Function=algorithm");
  }
  const FunctionId function{std::string(detail::trim(spec.substr(0, eq)))};
  const auto algs = detail::split(spec.substr(eq + 1), '+');
  if (algs.size() == 1) {
    return AlgorithmModel{function, parse_algorithm(algs[0]), {}};
  }
  const auto names = function.components();
  std::vector<AlgorithmModel> parts;
  for (std::size_t i = 0; i < algs.size(); ++i) {
    const auto alg = parse_algorithm(algs[i]);
    const auto fn = names.size() == algs.size() ? names[i] : component_function(alg);
    parts.push_back(AlgorithmModel{fn, alg, {}});
  }
  return AlgorithmModel{function, Algorithm::composite, std::move(parts)};
}

std::uint64_t ceil_log2(std::uint64_t p) {
  std::uint64_t steps = 0;
  while ((std::uint64_t{1} << steps) < p) ++steps;
  return steps;
}

HockneyTerms hockney_terms(const AlgorithmModel& model, const HockneyParams& params,
                           Bytes msize) {
  params.validate();
  const auto p = static_cast<std::uint64_t>(params.procs);
  const double m = static_cast<double>(msize);
  const double beta = params.beta_us_per_byte;
  // fraction of the volume that crosses the network in gather/scatter style
  // collectives: every non-root block once
  const double spread = static_cast<double>(p - 1) / static_cast<double>(p);

  HockneyTerms t;
  switch (model.algorithm) {
    case Algorithm::gather_direct:
      t.latency_steps = p - 1;
      t.bandwidth_us = spread * m * beta;
      break;
    case Algorithm::gather_binomial:
    case Algorithm::scatter_binomial:
      t.latency_steps = ceil_log2(p);
      t.bandwidth_us = spread * m * beta;
      break;
    case Algorithm::bcast_binomial:
    case Algorithm::reduce_binomial:
      t.latency_steps = ceil_log2(p);
      t.bandwidth_us = static_cast<double>(ceil_log2(p)) * m * beta;
      break;
    case Algorithm::allgather_ring:
      t.latency_steps = p - 1;
      t.bandwidth_us = spread * m * beta;
      break;
    case Algorithm::allreduce_ring:
      // reduce-scatter phase followed by an allgather phase
      t.latency_steps = 2 * (p - 1);
      t.bandwidth_us = 2.0 * spread * m * beta;
      break;
    case Algorithm::composite: {
      if (model.components.empty()) throw Error("composite model without components");
      for (const auto& c : model.components) {
        const auto sub = hockney_terms(c, params, msize);
        t.latency_steps += sub.latency_steps;
        t.bandwidth_us += sub.bandwidth_us;
      }
      break;
    }
  }
  t.latency_us = static_cast<double>(t.latency_steps) * params.alpha_us;
  return t;
}

double hockney_time(const AlgorithmModel& model, const HockneyParams& params,
                    Bytes msize) {
  return hockney_terms(model, params, msize).total();
}

std::uint64_t stream_key(std::uint64_t seed, std::string_view function,
                         std::uint64_t a, std::uint64_t b) {
  std::uint64_t h = 14695981039346656037ULL;
  const auto mix = [&h](unsigned char byte) {
    h ^= byte;
    h *= 1099511628211ULL;
  };
  const auto mix_u64 = [&](std::uint64_t v) {
    for (int i = 0; i < 8; ++i) mix(static_cast<unsigned char>(v >> (8 * i)));
  };
  mix_u64(seed);
  for (char c : function) mix(static_cast<unsigned char>(c));
  mix(0);
  mix_u64(a);
  mix_u64(b);
  return h;
}

double mpirun_offset(std::size_t mpirun, double noise_sigma, std::uint64_t seed) {
  if (noise_sigma == 0.0) return 1.0;
  std::mt19937_64 rng(stream_key(seed, "#mpirun", mpirun, 0));
  std::normal_distribution<double> normal(0.0, 1.0);
  return std::exp(noise_sigma * normal(rng));
}

SyntheticSource::SyntheticSource(const AlgorithmModel& model,
                                 const HockneyParams& params, Bytes msize,
                                 std::size_t mpirun, double noise_sigma,
                                 std::uint64_t seed)
    : base_us_(hockney_time(model, params, msize) *
               mpirun_offset(mpirun, noise_sigma, seed)),
      noise_sigma_(noise_sigma),
      rng_(stream_key(seed, model.function.name(), msize, mpirun)) {
  if (!(noise_sigma >= 0.0) || !std::isfinite(noise_sigma)) {
    throw Error("noise sigma must be non-negative");
  }
}

double SyntheticSource::operator()() {
  if (noise_sigma_ == 0.0) return base_us_;
  return base_us_ * std::exp(noise_sigma_ * normal_(rng_));
}

Dataset generate_synthetic(const SyntheticSpec& spec) {
  spec.params.validate();
  if (spec.models.empty()) throw Error("synthetic: no models given");
  if (spec.sizes.empty()) throw Error("synthetic: no message sizes given");
  for (std::size_t i = 0; i < spec.sizes.size(); ++i) {
    if (spec.sizes[i] < 1 || (i > 0 && spec.sizes[i] <= spec.sizes[i - 1])) {
      throw Error("synthetic: message sizes must be ascending and >= 1");
    }
  }
  if (spec.runs < 2) throw Error("synthetic: at least two mpiruns are required");
  if (spec.reps < 1) throw Error("synthetic: at least one repetition is required");
  if (!(spec.noise_sigma >= 0.0) || !std::isfinite(spec.noise_sigma)) {
    throw Error("synthetic: noise sigma must be non-negative");
  }
  std::set<FunctionId> names;
  for (const auto& m : spec.models) {
    if (!names.insert(m.function).second) {
      throw Error("synthetic: more than one model for " + m.function.name());
    }
  }

  Dataset ds;
  ds.process_layout = std::to_string(spec.params.procs) + "x1";
  ds.metadata["generator"] = "synthetic-hockney";
  ds.metadata["alpha_us"] = detail::format_double(spec.params.alpha_us);
  ds.metadata["beta_us_per_byte"] = detail::format_double(spec.params.beta_us_per_byte);
  ds.metadata["noise_sigma"] = detail::format_double(spec.noise_sigma);
  ds.metadata["seed"] = std::to_string(spec.seed);
  ds.samples.reserve(spec.models.size() * spec.sizes.size() * spec.runs * spec.reps);
  for (const auto& model : spec.models) {
    for (auto msize : spec.sizes) {
      for (std::size_t run = 0; run < spec.runs; ++run) {
        SyntheticSource source(model, spec.params, msize, run, spec.noise_sigma, spec.seed);
        for (std::size_t rep = 0; rep < spec.reps; ++rep) {
          ds.samples.push_back(TimingSample{model.function, msize, run, rep, source()});
        }
      }
    }
  }
  ds.canonicalize();
  return ds;
}

std::map<FunctionId, MedianSeries> reduce_to_medians(const Dataset& dataset) {
  dataset.validate();
  std::map<FunctionId, std::map<Bytes, std::map<std::size_t, std::vector<double>>>> cells;
  for (const auto& s : dataset.samples) {
    cells[s.function][s.msize][s.mpirun].push_back(s.time_us);
  }
  std::map<FunctionId, MedianSeries> out;
  for (auto& [function, by_size] : cells) {
    MedianSeries series{function, dataset.process_layout, {}, {}};
    for (auto& [msize, by_run] : by_size) {
      std::vector<double> medians;
      medians.reserve(by_run.size());
      for (auto& [run, times] : by_run) medians.push_back(stats::median(times));
      series.sizes.push_back(msize);
      series.medians.emplace_back(std::move(medians));
    }
    series.validate();
    out.emplace(function, std::move(series));
  }
  return out;
}

MedianSeries derive_composite_series(const FunctionId& mockup,
                                     const std::map<FunctionId, MedianSeries>& series) {
  const auto parts = mockup.components();
  if (parts.size() < 2) throw Error(mockup.name() + " is not a composite");
  const MedianSeries* first = nullptr;
  for (const auto& p : parts) {
    const auto it = series.find(p);
    if (it == series.end()) throw Error("missing data for component " + p.name());
    if (first && (it->second.sizes != first->sizes || it->second.runs() != first->runs())) {
      throw Error("incomparable series: components of " + mockup.name() +
                  " differ in size grid or run count");
    }
    if (!first) first = &it->second;
  }
  MedianSeries out{mockup, first->process_layout, first->sizes, {}};
  for (std::size_t i = 0; i < first->sizes.size(); ++i) {
    std::vector<double> sums(first->runs(), 0.0);
    for (const auto& p : parts) {
      const auto& m = series.at(p).medians[i];
      for (std::size_t r = 0; r < sums.size(); ++r) sums[r] += m[r];
    }
    out.medians.emplace_back(std::move(sums));
  }
  return out;
}

}  // namespace pgcheck::datasets
