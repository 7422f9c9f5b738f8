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

#include "pgcheck/nrep.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "pgcheck/error.hpp"
#include "pgcheck/stats.hpp"
#include "text_util.hpp"

namespace pgcheck::nrep {

std::string_view to_string(Metric metric) {
  switch (metric) {
    case Metric::rse: return "rse";
    case Metric::cov_mean: return "cov_mean";
    case Metric::cov_median: return "cov_median";
  }
  return "unknown";
}

Metric parse_metric(std::string_view name) {
  name = detail::trim(name);
  if (name == "rse") return Metric::rse;
  if (name == "cov_mean") return Metric::cov_mean;
  if (name == "cov_median") return Metric::cov_median;
  throw Error("unknown prediction method '" + std::string(name) + "'");
}

void NrepConfig::validate() const {
  if (min < 2) throw Error("nrep: min must be at least 2");
  if (min > max) throw Error("nrep: min must not exceed max");
  if (step < 1) throw Error("nrep: step must be positive");
  if (methods.empty()) throw Error("nrep: at least one prediction method is required");
  for (const auto& m : methods) {
    if (!(m.threshold > 0.0) || !std::isfinite(m.threshold)) {
      throw Error("nrep: threshold for " + std::string(to_string(m.metric)) +
                  " must be positive");
    }
    if (m.metric != Metric::rse && m.window < 2) {
      throw Error("nrep: window for " + std::string(to_string(m.metric)) +
                  " must be at least 2");
    }
  }
}

std::vector<std::size_t> NrepConfig::checkpoints() const {
  std::vector<std::size_t> out;
  for (std::size_t n = min; n <= max; n += step) out.push_back(n);
  if (out.empty() || out.back() != max) out.push_back(max);
  return out;
}

NrepPredictor::NrepPredictor(NrepConfig config) : config_(std::move(config)) {
  config_.validate();
  checkpoints_ = config_.checkpoints();
  timings_.reserve(config_.max);
}

bool NrepPredictor::add(double time_us) {
  if (decision_) return true;
  if (!std::isfinite(time_us) || time_us <= 0.0) {
    throw Error("nrep: run-times must be strictly positive and finite");
  }
  timings_.push_back(time_us);
  if (timings_.size() == checkpoints_[next_checkpoint_]) {
    evaluate();
    ++next_checkpoint_;
  }
  return decision_.has_value();
}

const NrepDecision& NrepPredictor::decision() const {
  if (!decision_) throw Error("nrep: no decision reached yet");
  return *decision_;
}

void NrepPredictor::evaluate() {
  const std::span<const double> seen(timings_);
  running_means_.push_back(stats::mean(seen));
  running_medians_.push_back(stats::median(seen));

  Checkpoint cp;
  cp.n = timings_.size();
  cp.satisfied = true;
  for (const auto& method : config_.methods) {
    std::optional<double> value;
    switch (method.metric) {
      case Metric::rse:
        if (seen.size() >= 2) value = stats::rse(seen);
        break;
      case Metric::cov_mean:
        if (running_means_.size() >= method.window) {
          value = stats::cov_over_window(running_means_, method.window);
        }
        break;
      case Metric::cov_median:
        if (running_medians_.size() >= method.window) {
          value = stats::cov_over_window(running_medians_, method.window);
        }
        break;
    }
    if (!value || !(*value < method.threshold)) cp.satisfied = false;
    cp.values.push_back(value);
  }
  trace_.push_back(cp);

  const bool last = cp.n == config_.max;
  if (cp.satisfied || last) {
    decision_ = NrepDecision{cp.n, cp.satisfied, std::move(trace_)};
  }
}

NrepDecision predict_nrep(std::span<const double> timings,
                          const NrepConfig& config) {
  config.validate();
  NrepPredictor predictor(config);
  for (double t : timings) {
    if (predictor.add(t)) return predictor.decision();
  }
  throw Error("nrep: stream ended after " + std::to_string(timings.size()) +
              " observations without a decision (max=" + std::to_string(config.max) + ")");
}

NrepDecision predict_nrep(const TimingSource& source, const NrepConfig& config) {
  NrepPredictor predictor(config);
  while (!predictor.add(source())) {
  }
  return predictor.decision();
}

std::size_t predict_nrep_multi(
    const std::array<std::span<const double>, 3>& streams,
    const NrepConfig& config) {
  std::size_t best = 0;
  for (const auto& s : streams) best = std::max(best, predict_nrep(s, config).nrep);
  return best;
}

void parse_rep_prediction(std::string_view spec, NrepConfig& config) {
  for (auto item : detail::split(spec, ',')) {
    item = detail::trim(item);
    if (item.empty()) continue;
    const auto eq = item.find('=');
    if (eq == std::string_view::npos) {
      throw Error("rep-prediction: expected key=value, got '" + std::string(item) + "'");
    }
    const auto key = detail::trim(item.substr(0, eq));
    const auto value = detail::parse_number<std::size_t>(item.substr(eq + 1));
    if (!value) {
      throw Error("rep-prediction: bad value in '" + std::string(item) + "'");
    }
    if (key == "min") {
      config.min = *value;
    } else if (key == "max") {
      config.max = *value;
    } else if (key == "step") {
      config.step = *value;
    } else {
      throw Error("rep-prediction: unknown key '" + std::string(key) + "'");
    }
  }
}

std::vector<MethodSpec> parse_methods(std::string_view methods,
                                      std::string_view thresholds,
                                      std::string_view windows) {
  const auto names = detail::split(methods, ',');
  const auto thres = detail::split(thresholds, ',');
  const auto wins = windows.empty() ? std::vector<std::string_view>{}
                                    : detail::split(windows, ',');
  if (thres.size() != names.size()) {
    throw Error("pred-method and var-thres must list the same number of entries");
  }
  if (!wins.empty() && wins.size() != names.size()) {
    throw Error("var-win must list one entry per prediction method");
  }
  std::vector<MethodSpec> out;
  for (std::size_t i = 0; i < names.size(); ++i) {
    MethodSpec spec;
    spec.metric = parse_metric(names[i]);
    const auto t = detail::parse_number<double>(thres[i]);
    if (!t) throw Error("var-thres: bad threshold '" + std::string(thres[i]) + "'");
    spec.threshold = *t;
    if (!wins.empty()) {
      const auto w = detail::trim(wins[i]);
      if (!w.empty() && w != "-") {
        const auto parsed = detail::parse_number<std::size_t>(w);
        if (!parsed) throw Error("var-win: bad window '" + std::string(w) + "'");
        spec.window = *parsed;
      }
    }
    out.push_back(spec);
  }
  return out;
}

}  // namespace pgcheck::nrep
