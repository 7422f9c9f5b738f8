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

#include "pgcheck/cli.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <functional>
#include <future>
#include <map>
#include <set>
#include <sstream>

#include <CLI11.hpp>

#include "pgcheck/error.hpp"
#include "text_util.hpp"

namespace pgcheck::cli {

using datasets::AlgorithmModel;
using datasets::Dataset;
using guidelines::Guideline;
using guidelines::GuidelineResult;
using guidelines::Kind;
using guidelines::MedianSeries;

namespace {

std::vector<Bytes> intersect(const std::vector<Bytes>& a, const std::vector<Bytes>& b) {
  std::vector<Bytes> out;
  std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

GuidelineResult skipped(const Guideline& g, std::string reason) {
  return GuidelineResult{g, {}, std::move(reason)};
}

std::string short_number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

std::string_view pattern_test_name(guidelines::PatternTest t) {
  switch (t) {
    case guidelines::PatternTest::wilcoxon: return "wilcoxon";
    case guidelines::PatternTest::ks: return "ks";
    case guidelines::PatternTest::both: return "both";
  }
  return "wilcoxon";
}

guidelines::PatternTest parse_pattern_test(std::string_view name) {
  if (name == "wilcoxon") return guidelines::PatternTest::wilcoxon;
  if (name == "ks") return guidelines::PatternTest::ks;
  if (name == "both") return guidelines::PatternTest::both;
  throw Error("unknown pattern test '" + std::string(name) + "'");
}

// Options shared by all subcommands.
struct GlobalOptions {
  double alpha = stats::kDefaultAlpha;
  double tolerance = 0.05;
  std::string format = "text";
  std::string guidelines = "builtin";
  std::string calls;
  std::string msizes;
  std::optional<std::size_t> runs;
};

struct SimulateOptions {
  std::optional<std::string> preset;
  std::vector<std::string> models;
  std::optional<std::size_t> procs;
  std::optional<double> latency_us;
  std::optional<double> beta_us_per_byte;
  std::optional<std::size_t> reps;
  std::optional<double> noise_sigma;
  std::optional<std::uint64_t> seed;
  std::string output;
};

struct NrepOptions {
  std::string input;
  std::string rep_prediction = "min=20,max=1000,step=10";
  std::string methods = "rse";
  std::string thresholds = "0.025";
  std::string windows;
};

struct CheckOptions {
  std::vector<std::string> inputs;
  std::string pattern_test = "wilcoxon";
  bool derive_mockups = false;
  std::string raw_out;
  std::string output;
};

struct ReportOptions {
  std::string input;
  std::string output;
};

void emit(const std::string& text, const std::string& path, std::ostream& out) {
  if (path.empty() || path == "-") {
    out << text;
    return;
  }
  std::ofstream file(path, std::ios::binary);
  if (!file) throw Error("cannot write '" + path + "'");
  file << text;
  if (!file) throw Error("write to '" + path + "' failed");
}

std::vector<Guideline> load_guidelines(const std::string& source) {
  if (source.empty() || source == "builtin") return guidelines::builtin_catalog();
  std::ifstream in(source);
  if (!in) throw Error("cannot open guideline catalog '" + source + "'");
  return guidelines::parse_catalog(in);
}

RunConfig make_run_config(const GlobalOptions& g) {
  RunConfig config;
  config.alpha = g.alpha;
  config.tolerance = g.tolerance;
  config.format = report::parse_format(g.format);
  config.guidelines = load_guidelines(g.guidelines);
  if (!g.calls.empty()) config.calls = parse_calls_list(g.calls);
  if (!g.msizes.empty()) config.msizes = parse_msizes_list(g.msizes);
  config.runs = g.runs;
  if (!(config.alpha > 0.0 && config.alpha < 1.0)) {
    throw Error("--alpha must lie in (0,1)");
  }
  return config;
}

int cmd_simulate(const GlobalOptions& g, const SimulateOptions& o, std::ostream& out) {
  datasets::SyntheticSpec spec;
  if (o.preset) {
    spec = preset(*o.preset);
  } else {
    spec.sizes = table_size_grid();
  }
  if (!o.models.empty()) {
    spec.models.clear();
    for (const auto& m : o.models) spec.models.push_back(datasets::parse_model(m));
  }
  if (spec.models.empty()) throw Error("simulate: give --preset or at least one --model");
  if (!g.calls.empty()) {
    const auto calls = parse_calls_list(g.calls);
    std::erase_if(spec.models, [&](const AlgorithmModel& m) {
      return std::find(calls.begin(), calls.end(), m.function) == calls.end();
    });
  }
  if (!g.msizes.empty()) spec.sizes = parse_msizes_list(g.msizes);
  if (g.runs) spec.runs = *g.runs;
  if (o.procs) spec.params.procs = *o.procs;
  if (o.latency_us) spec.params.alpha_us = *o.latency_us;
  if (o.beta_us_per_byte) spec.params.beta_us_per_byte = *o.beta_us_per_byte;
  if (o.reps) spec.reps = *o.reps;
  if (o.noise_sigma) spec.noise_sigma = *o.noise_sigma;
  if (o.seed) spec.seed = *o.seed;

  auto ds = datasets::generate_synthetic(spec);
  if (o.preset) ds.metadata["preset"] = *o.preset;
  std::ostringstream text;
  datasets::write_dataset(text, std::move(ds));
  emit(text.str(), o.output, out);
  return kExitClean;
}

void print_decision(std::ostream& out, const nrep::NrepConfig& config,
                    std::size_t stream, const nrep::NrepDecision& d) {
  out << "  stream " << stream << ": nrep=" << d.nrep
      << " stopped_early=" << (d.stopped_early ? "true" : "false") << '\n';
  for (const auto& cp : d.trace) {
    out << "    n=" << cp.n;
    for (std::size_t i = 0; i < config.methods.size(); ++i) {
      out << ' ' << nrep::to_string(config.methods[i].metric) << '='
          << (cp.values[i] ? short_number(*cp.values[i]) : std::string("-"));
    }
    if (cp.satisfied) out << " stop";
    out << '\n';
  }
}

int cmd_nrep(const GlobalOptions& g, const NrepOptions& o, const SimulateOptions& live,
             std::ostream& out, std::ostream& err) {
  nrep::NrepConfig config;
  nrep::parse_rep_prediction(o.rep_prediction, config);
  config.methods = nrep::parse_methods(o.methods, o.thresholds, o.windows);
  config.validate();

  const auto calls = g.calls.empty() ? std::vector<FunctionId>{} : parse_calls_list(g.calls);
  const auto sizes = g.msizes.empty() ? std::vector<Bytes>{} : parse_msizes_list(g.msizes);
  const auto wanted = [&](const FunctionId& f, Bytes m) {
    return (calls.empty() || std::find(calls.begin(), calls.end(), f) != calls.end()) &&
           (sizes.empty() || std::find(sizes.begin(), sizes.end(), m) != sizes.end());
  };

  // (function, msize) -> up to three independent decisions
  std::map<std::pair<FunctionId, Bytes>, std::vector<nrep::NrepDecision>> results;
  if (!o.input.empty()) {
    const auto ds = datasets::read_dataset_file(o.input);
    std::map<std::pair<FunctionId, Bytes>, std::map<std::size_t, std::map<std::size_t, double>>>
        streams;
    for (const auto& s : ds.samples) {
      if (wanted(s.function, s.msize)) streams[{s.function, s.msize}][s.mpirun][s.rep] = s.time_us;
    }
    if (streams.empty()) throw Error("nrep: no timing streams selected");
    for (const auto& [key, by_run] : streams) {
      std::size_t used = 0;
      for (const auto& [run, by_rep] : by_run) {
        if (used++ == 3) break;
        std::vector<double> times;
        for (const auto& [rep, t] : by_rep) times.push_back(t);
        try {
          results[key].push_back(nrep::predict_nrep(times, config));
        } catch (const Error& e) {
          throw Error(key.first.name() + " msize " + std::to_string(key.second) +
                      " mpirun " + std::to_string(run) + ": " + e.what());
        }
      }
    }
  } else {
    if (live.models.empty()) throw Error("nrep: give --input or at least one --model");
    if (sizes.empty()) throw Error("nrep: live mode needs --msizes-list");
    datasets::HockneyParams params;
    if (live.procs) params.procs = *live.procs;
    if (live.latency_us) params.alpha_us = *live.latency_us;
    if (live.beta_us_per_byte) params.beta_us_per_byte = *live.beta_us_per_byte;
    const double sigma = live.noise_sigma.value_or(0.05);
    const std::uint64_t seed = live.seed.value_or(1);
    for (const auto& spec : live.models) {
      const auto model = datasets::parse_model(spec);
      for (auto m : sizes) {
        if (!wanted(model.function, m)) continue;
        for (std::size_t run = 0; run < 3; ++run) {
          datasets::SyntheticSource source(model, params, m, run, sigma, seed);
          results[{model.function, m}].push_back(
              nrep::predict_nrep(nrep::TimingSource(std::ref(source)), config));
        }
      }
    }
  }

  for (const auto& [key, decisions] : results) {
    std::size_t nrep = 0;
    bool stable = true;
    for (const auto& d : decisions) {
      nrep = std::max(nrep, d.nrep);
      stable = stable && d.stopped_early;
    }
    out << key.first.name() << " msize=" << key.second << " nrep=" << nrep
        << " stopped_early=" << (stable ? "true" : "false") << '\n';
    for (std::size_t i = 0; i < decisions.size(); ++i) {
      print_decision(out, config, i, decisions[i]);
    }
    if (!stable) {
      err << "warning: " << key.first.name() << " msize " << key.second
          << ": metrics did not fall below their thresholds within max=" << config.max
          << " repetitions\n";
    }
  }
  return kExitClean;
}

int cmd_check(const GlobalOptions& g, const CheckOptions& o, std::ostream& out) {
  if (o.inputs.empty()) throw Error("check: at least one --input dataset is required");
  auto config = make_run_config(g);
  config.pattern_test = parse_pattern_test(o.pattern_test);
  config.derive_mockups = o.derive_mockups;
  std::vector<Dataset> parts;
  for (const auto& path : o.inputs) parts.push_back(datasets::read_dataset_file(path));
  const auto ds = datasets::merge(std::move(parts));
  const auto rep = analyze(ds, config);
  if (!o.raw_out.empty()) emit(report::render_report(rep, report::Format::csv), o.raw_out, out);
  emit(report::render_report(rep, config.format), o.output, out);
  return rep.has_violations() ? kExitViolations : kExitClean;
}

int cmd_report(const GlobalOptions& g, const ReportOptions& o, std::ostream& out) {
  std::ifstream in(o.input, std::ios::binary);
  if (!in) throw Error("cannot open raw results '" + o.input + "'");
  const auto rep = report::parse_raw_results(in);
  emit(report::render_report(rep, report::parse_format(g.format)), o.output, out);
  return rep.has_violations() ? kExitViolations : kExitClean;
}

}  // namespace

std::vector<FunctionId> parse_calls_list(std::string_view list) {
  std::vector<FunctionId> out;
  for (auto item : detail::split(list, ',')) {
    item = detail::trim(item);
    if (item.empty()) continue;
    std::string name(item);
    // MPI_Reduce+MPI_Bcast -> Reduce+Bcast
    std::string clean;
    for (auto part : detail::split(name, '+')) {
      part = detail::trim(part);
      if (part.starts_with("MPI_")) part.remove_prefix(4);
      if (!clean.empty()) clean += '+';
      clean += part;
    }
    out.emplace_back(clean);
  }
  return out;
}

std::vector<Bytes> parse_msizes_list(std::string_view list) {
  std::vector<Bytes> out;
  for (auto item : detail::split(list, ',')) {
    if (detail::trim(item).empty()) continue;
    const auto v = detail::parse_number<Bytes>(item);
    if (!v || *v < 1) throw Error("bad message size '" + std::string(item) + "'");
    out.push_back(*v);
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

std::vector<Bytes> table_size_grid() {
  return {1,    2,    4,    8,    16,   32,   64,    100,   128,   256,   512,
          1024, 1500, 2048, 4096, 5000, 8192, 10000, 16384, 32768, 102400};
}

datasets::SyntheticSpec preset(std::string_view name) {
  using datasets::Algorithm;
  datasets::SyntheticSpec spec;
  spec.params.procs = 32;
  spec.params.alpha_us = 1.7;
  spec.params.beta_us_per_byte = 2.5e-4;
  spec.sizes = table_size_grid();
  spec.runs = 10;
  spec.reps = 100;
  spec.noise_sigma = 0.05;
  spec.seed = 1;
  const auto allgather = AlgorithmModel::sequence(
      "Allgather", {AlgorithmModel::simple("Gather", Algorithm::gather_binomial),
                    AlgorithmModel::simple("Bcast", Algorithm::bcast_binomial)});
  if (name == "gather-direct-32") {
    spec.models = {AlgorithmModel::simple("Gather", Algorithm::gather_direct), allgather};
  } else if (name == "gather-binomial-32") {
    spec.models = {AlgorithmModel::simple("Gather", Algorithm::gather_binomial), allgather};
  } else {
    throw Error("unknown preset '" + std::string(name) + "'");
  }
  return spec;
}

report::ViolationReport analyze(const Dataset& dataset, const RunConfig& config) {
  const auto series = datasets::reduce_to_medians(dataset);

  std::set<std::size_t> run_counts;
  std::vector<Bytes> all_sizes;
  for (const auto& [f, s] : series) {
    run_counts.insert(s.runs());
    all_sizes.insert(all_sizes.end(), s.sizes.begin(), s.sizes.end());
  }
  if (config.runs && (run_counts.size() != 1 || *run_counts.begin() != *config.runs)) {
    throw Error("dataset does not hold exactly " + std::to_string(*config.runs) +
                " mpiruns per measurement");
  }
  std::sort(all_sizes.begin(), all_sizes.end());
  all_sizes.erase(std::unique(all_sizes.begin(), all_sizes.end()), all_sizes.end());
  const auto columns = config.msizes.empty() ? all_sizes : config.msizes;

  std::vector<FunctionId> calls = config.calls;
  if (calls.empty()) {
    for (const auto& [f, s] : series) {
      if (!f.is_composite()) calls.push_back(f);
    }
  }

  std::vector<Guideline> selected;
  for (const auto& g : config.guidelines) {
    if (g.kind != Kind::pattern && g.is_template()) {
      for (const auto& f : calls) selected.push_back(guidelines::instantiate(g, f));
    } else {
      selected.push_back(g);
    }
  }

  const auto lookup = [&](const FunctionId& f) -> std::optional<MedianSeries> {
    const auto it = series.find(f);
    if (it == series.end()) return std::nullopt;
    return it->second.restrict_to(intersect(it->second.sizes, columns));
  };

  const auto run_one = [&](const Guideline& g) -> std::pair<GuidelineResult, bool> {
    try {
      const auto subject = lookup(g.subject);
      if (!subject) return {skipped(g, "missing data for " + g.subject.name()), false};
      switch (g.kind) {
        case Kind::monotony:
          return {guidelines::evaluate_monotony(*subject, config.alpha), false};
        case Kind::split_robustness:
          return {guidelines::evaluate_split_robustness(*subject, config.tolerance), false};
        case Kind::pattern: {
          auto mockup = lookup(*g.mockup);
          bool derived = false;
          if (!mockup && config.derive_mockups && g.mockup->is_composite()) {
            try {
              const auto d = datasets::derive_composite_series(*g.mockup, series);
              mockup = d.restrict_to(intersect(d.sizes, columns));
              derived = true;
            } catch (const Error& e) {
              return {skipped(g, std::string("missing data: ") + e.what()), false};
            }
          }
          if (!mockup) return {skipped(g, "missing data for " + g.mockup->name()), false};
          const auto common = intersect(subject->sizes, mockup->sizes);
          if (common.empty()) return {skipped(g, "missing data: no common message sizes"), false};
          return {guidelines::evaluate_pattern(g, subject->restrict_to(common),
                                               mockup->restrict_to(common), config.alpha,
                                               config.pattern_test),
                  derived};
        }
      }
    } catch (const Error& e) {
      return {skipped(g, e.what()), false};
    }
    return {skipped(g, "unsupported guideline"), false};
  };

  std::vector<std::future<std::pair<GuidelineResult, bool>>> jobs;
  jobs.reserve(selected.size());
  for (const auto& g : selected) jobs.push_back(std::async(std::launch::async, run_one, g));
  std::vector<GuidelineResult> rows;
  bool any_derived = false;
  for (auto& job : jobs) {
    auto [row, derived] = job.get();
    any_derived = any_derived || derived;
    rows.push_back(std::move(row));
  }

  std::vector<std::pair<std::string, std::string>> provenance;
  if (!dataset.process_layout.empty()) {
    provenance.emplace_back("process_layout", dataset.process_layout);
  }
  for (const auto& [k, v] : dataset.metadata) provenance.emplace_back(k, v);
  if (run_counts.size() == 1) {
    provenance.emplace_back("runs", std::to_string(*run_counts.begin()));
  }
  provenance.emplace_back("alpha", detail::format_double(config.alpha));
  provenance.emplace_back("tolerance", detail::format_double(config.tolerance));
  provenance.emplace_back("pattern_test", std::string(pattern_test_name(config.pattern_test)));
  if (any_derived) {
    provenance.emplace_back(std::string(report::kMockupSourceKey),
                            std::string(report::kDerivedMockups));
  }
  return report::build_report(columns, std::move(rows), std::move(provenance));
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"pgcheck: verify performance guidelines of collective operations", "pgcheck"};
  app.require_subcommand(1);

  GlobalOptions g;
  app.add_option("--alpha", g.alpha, "Significance level of the rank tests")
      ->capture_default_str();
  app.add_option("--tolerance", g.tolerance, "Split-robustness tolerance")
      ->capture_default_str();
  app.add_option("--format", g.format, "Output format: text, markdown or csv")
      ->capture_default_str();
  app.add_option("--guidelines", g.guidelines, "Guideline catalog file or 'builtin'")
      ->capture_default_str();
  app.add_option("--calls-list", g.calls, "Comma-separated functions, e.g. MPI_Reduce,Bcast");
  app.add_option("--msizes-list", g.msizes, "Comma-separated message sizes in bytes");
  app.add_option("--runs", g.runs, "Number of mpiruns R");

  SimulateOptions sim;
  auto* simulate = app.add_subcommand("simulate", "Write a synthetic Hockney-model dataset");
  simulate->fallthrough();
  simulate->add_option("--preset", sim.preset, "gather-direct-32 or gather-binomial-32");
  simulate->add_option("--model", sim.models, "Function=algorithm[+algorithm...]");
  simulate->add_option("--procs", sim.procs, "Process count p");
  simulate->add_option("--latency-us", sim.latency_us, "Latency per message (us)");
  simulate->add_option("--beta-us-per-byte", sim.beta_us_per_byte, "Transfer time per byte (us)");
  simulate->add_option("--reps", sim.reps, "Repetitions per mpirun");
  simulate->add_option("--noise-sigma", sim.noise_sigma, "Lognormal noise sigma");
  simulate->add_option("--seed", sim.seed, "Generator seed");
  simulate->add_option("-o,--output", sim.output, "Output file (default stdout)");

  NrepOptions nr;
  SimulateOptions live;
  auto* nrep_cmd = app.add_subcommand("nrep", "Predict the number of repetitions");
  nrep_cmd->fallthrough();
  nrep_cmd->add_option("--input", nr.input, "Dataset whose streams are replayed");
  nrep_cmd->add_option("--rep-prediction", nr.rep_prediction, "min=<i>,max=<i>,step=<i>")
      ->capture_default_str();
  nrep_cmd->add_option("--pred-method", nr.methods, "rse, cov_mean, cov_median (comma list)")
      ->capture_default_str();
  nrep_cmd->add_option("--var-thres", nr.thresholds, "One threshold per method")
      ->capture_default_str();
  nrep_cmd->add_option("--var-win", nr.windows, "One window per method, '-' for none");
  nrep_cmd->add_option("--model", live.models, "Live mode: Function=algorithm");
  nrep_cmd->add_option("--procs", live.procs, "Live mode: process count p");
  nrep_cmd->add_option("--latency-us", live.latency_us, "Live mode: latency (us)");
  nrep_cmd->add_option("--beta-us-per-byte", live.beta_us_per_byte, "Live mode: per-byte time");
  nrep_cmd->add_option("--noise-sigma", live.noise_sigma, "Live mode: lognormal sigma");
  nrep_cmd->add_option("--seed", live.seed, "Live mode: seed");

  CheckOptions chk;
  auto* check = app.add_subcommand("check", "Verify guidelines on one or more datasets");
  check->fallthrough();
  check->add_option("--input", chk.inputs, "Dataset file(s)")->required();
  check->add_option("--pattern-test", chk.pattern_test, "wilcoxon, ks or both")
      ->capture_default_str();
  check->add_flag("--derive-mockups", chk.derive_mockups,
                  "Sum component medians when a composite was not measured");
  check->add_option("--raw-out", chk.raw_out, "Also write raw results CSV here");
  check->add_option("-o,--output", chk.output, "Report file (default stdout)");

  ReportOptions rep;
  auto* report_cmd = app.add_subcommand("report", "Re-render saved raw results");
  report_cmd->fallthrough();
  report_cmd->add_option("--input", rep.input, "Raw results CSV")->required();
  report_cmd->add_option("-o,--output", rep.output, "Report file (default stdout)");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kExitError;
  }

  try {
    if (simulate->parsed()) return cmd_simulate(g, sim, out);
    if (nrep_cmd->parsed()) return cmd_nrep(g, nr, live, out, err);
    if (check->parsed()) return cmd_check(g, chk, out);
    if (report_cmd->parsed()) return cmd_report(g, rep, out);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitError;
  }
  return kExitError;
}

}  // namespace pgcheck::cli
