// Copyright 2026 The fran_aoi Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "fran_aoi/optimizer.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "fran_aoi/nsr_analysis.h"
#include "fran_aoi/osr_analysis.h"

namespace fran_aoi {
namespace {

std::string fmt_num(double v) {
  std::ostringstream os;
  os << v;
  return os.str();
}

void check_totals(const NetworkConfig& config, double b_total, double r_total, double head_rate) {
  config.validate();
  std::vector<Violation> v;
  const int K = config.num_cps;
  if (!(b_total >= 0.0) || !(r_total >= 0.0)) {
    v.push_back({"rate_range", "b and r must be non-negative"});
  }
  if (b_total > config.request_budget + kFeasibilitySlack) {
    v.push_back({"request_budget", "b = " + fmt_num(b_total) + " > B = " + fmt_num(config.request_budget)});
  }
  if (r_total > config.command_budget + kFeasibilitySlack) {
    v.push_back({"command_budget", "r = " + fmt_num(r_total) + " > R = " + fmt_num(config.command_budget)});
  }
  if (b_total / K > 1.0 + kFeasibilitySlack) {
    v.push_back({"cp_request_simplex", "b/K = " + fmt_num(b_total / K) + " > 1"});
  }
  if (head_rate > 1.0 + kFeasibilitySlack) {
    v.push_back({"rate_range", "command rate " + fmt_num(head_rate) + " > 1"});
  }
  if (!v.empty()) throw InfeasiblePolicyError(std::move(v));
}

// Budgets wide enough that any b_k in [0, 1] is admissible.
NetworkConfig probe_config(const NetworkConfig& config, double r_total) {
  NetworkConfig out = config;
  out.request_budget = std::max(config.request_budget, static_cast<double>(config.num_cps));
  out.command_budget = std::max(config.command_budget, r_total);
  return out;
}

RequestLayout pick_layout(double per_cp, double threshold) {
  return per_cp > threshold ? RequestLayout::kEvenSplit : RequestLayout::kConsolidated;
}

RequestLayout other(RequestLayout layout) {
  return layout == RequestLayout::kEvenSplit ? RequestLayout::kConsolidated : RequestLayout::kEvenSplit;
}

std::vector<double> nsr_head_rates(int K, double r_total) {
  std::vector<double> r(K, 0.0);
  r[0] = r_total;
  return r;
}

Policy make_policy(PolicyClass cls, RequestRates requests, std::vector<double> rates, int z,
                   TieRule tie_rule) {
  if (cls == PolicyClass::kOsr) return OsrPolicy{std::move(requests), std::move(rates)};
  return NsrPolicy(std::move(requests), std::move(rates), z, tie_rule);
}

}  // namespace

std::string_view to_string(PolicyClass cls) { return cls == PolicyClass::kOsr ? "osr" : "nsr"; }

PolicyClass parse_policy_class(std::string_view text) {
  if (text == "osr" || text == "OSR") return PolicyClass::kOsr;
  if (text == "nsr" || text == "NSR") return PolicyClass::kNsr;
  throw std::invalid_argument("unknown policy class '" + std::string(text) + "' (expected osr or nsr)");
}

std::string_view to_string(RequestLayout layout) {
  return layout == RequestLayout::kEvenSplit ? "even-split" : "consolidated";
}

ThresholdEstimate threshold_w_approx(double r_total, int num_cps) {
  if (num_cps < 1) throw std::invalid_argument("K must be >= 1");
  const double per_cp = r_total / num_cps;
  if (!(per_cp >= 0.0 && per_cp <= 1.0 + kFeasibilitySlack)) {
    throw std::invalid_argument("r/K = " + fmt_num(per_cp) + " outside [0, 1]");
  }
  return {2.0 / (3.0 - per_cp), num_cps != 2};
}

RequestRates layout_requests(int num_cps, int num_errhs, double per_cp, RequestLayout layout,
                             int designated) {
  if (designated < 0 || designated >= num_errhs) throw DimensionError("designated eRRH out of range");
  RequestRates b(num_cps, num_errhs, 0.0);
  for (int k = 0; k < num_cps; ++k) {
    if (layout == RequestLayout::kEvenSplit) {
      for (int n = 0; n < num_errhs; ++n) b(k, n) = per_cp / num_errhs;
    } else {
      b(k, designated) = per_cp;
    }
  }
  return b;
}

JcEvaluator simulation_evaluator(const NetworkConfig& config, const RunParams& params) {
  return [config, params](const Policy& policy) { return run(config, policy, params).jc_hat; };
}

JcEvaluator bound_evaluator(const NetworkConfig& config) {
  return [config](const Policy& policy) {
    if (const auto* osr = std::get_if<OsrPolicy>(&policy)) {
      return std::min(jc_upper_bound_fresh(*osr, config), jc_upper_bound_replace(*osr, config));
    }
    const NsrBounds b = jc_upper_bounds_nsr(std::get<NsrPolicy>(policy), config);
    return std::min(b.fresh, b.replace);
  };
}

RunParams default_threshold_budget() {
  RunParams p;
  p.slots = 200'000;
  p.warmup = 2'000;
  p.replications = 2;
  p.seed = 1;
  return p;
}

EmpiricalThreshold empirical_threshold(const NetworkConfig& config, double r_total, PolicyClass cls,
                                       const JcEvaluator& evaluator, int nsr_threshold_age,
                                       TieRule tie_rule) {
  config.validate();
  const int K = config.num_cps;
  const std::vector<double> rates =
      cls == PolicyClass::kOsr ? std::vector<double>(K, r_total / K) : nsr_head_rates(K, r_total);

  EmpiricalThreshold result;
  // Positive when the even split gives the lower J_c.
  auto advantage = [&](double per_cp) {
    ThresholdProbe probe{per_cp, 0.0, 0.0};
    try {
      probe.jc_consolidated = evaluator(make_policy(
          cls, layout_requests(K, config.num_errhs, per_cp, RequestLayout::kConsolidated), rates,
          nsr_threshold_age, tie_rule));
      probe.jc_even = evaluator(make_policy(
          cls, layout_requests(K, config.num_errhs, per_cp, RequestLayout::kEvenSplit), rates,
          nsr_threshold_age, tie_rule));
    } catch (const std::exception& e) {
      throw std::runtime_error("threshold probe at b_k = " + fmt_num(per_cp) + ": " + e.what());
    }
    result.probes.push_back(probe);
    return probe.jc_consolidated - probe.jc_even;
  };

  double lo = kThresholdTolerance;
  double hi = 1.0;
  const double f_lo = advantage(lo);
  const double f_hi = advantage(hi);
  if (!std::isfinite(f_lo) || !std::isfinite(f_hi) || !(f_lo <= 0.0 && f_hi > 0.0)) {
    result.value = threshold_w_approx(r_total, K).value;
    result.crossover_found = false;
    return result;
  }
  while (hi - lo > kThresholdTolerance) {
    const double mid = 0.5 * (lo + hi);
    const double f = advantage(mid);
    if (f > 0.0) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  result.value = 0.5 * (lo + hi);
  result.crossover_found = true;
  return result;
}

OptimalChoice optimal_osr_choice(const NetworkConfig& config, double b_total, double r_total,
                                 const OptimalOptions& options) {
  const int K = config.num_cps;
  check_totals(config, b_total, r_total, r_total / K);
  OptimalChoice choice{OsrPolicy{}, RequestLayout::kEvenSplit, 0.0, false, true, false, std::nullopt};
  if (options.threshold) {
    choice.threshold = *options.threshold;
  } else {
    const ThresholdEstimate w = threshold_w_approx(r_total, K);
    choice.threshold = w.value;
    choice.heuristic_threshold = w.heuristic;
  }
  const double per_cp = b_total / K;
  choice.layout = pick_layout(per_cp, choice.threshold);
  const std::vector<double> rates(K, r_total / K);
  choice.policy = OsrPolicy{
      layout_requests(K, config.num_errhs, per_cp, choice.layout, options.designated_errh), rates};
  choice.near_threshold = std::abs(per_cp - choice.threshold) < options.near_band;
  if (choice.near_threshold) {
    choice.alternative = OsrPolicy{
        layout_requests(K, config.num_errhs, per_cp, other(choice.layout), options.designated_errh), rates};
  }
  return choice;
}

OsrPolicy optimal_osr(const NetworkConfig& config, double b_total, double r_total,
                      const OptimalOptions& options) {
  return std::get<OsrPolicy>(optimal_osr_choice(config, b_total, r_total, options).policy);
}

OptimalChoice optimal_nsr_choice(const NetworkConfig& config, double b_total, double r_total,
                                 const OptimalOptions& options, const JcEvaluator& evaluator) {
  const int K = config.num_cps;
  check_totals(config, b_total, r_total, r_total);
  OptimalChoice choice{OsrPolicy{}, RequestLayout::kEvenSplit, 0.0, false, true, false, std::nullopt};
  if (options.threshold) {
    choice.threshold = *options.threshold;
  } else {
    const JcEvaluator eval =
        evaluator ? evaluator
                  : simulation_evaluator(probe_config(config, r_total), default_threshold_budget());
    const EmpiricalThreshold w = empirical_threshold(config, r_total, PolicyClass::kNsr, eval,
                                                     options.nsr_threshold_age, options.tie_rule);
    choice.threshold = w.value;
    choice.crossover_found = w.crossover_found;
    choice.heuristic_threshold = !w.crossover_found && K != 2;
  }
  const double per_cp = b_total / K;
  choice.layout = pick_layout(per_cp, choice.threshold);
  const std::vector<double> rates = nsr_head_rates(K, r_total);
  choice.policy = NsrPolicy(
      layout_requests(K, config.num_errhs, per_cp, choice.layout, options.designated_errh), rates,
      options.nsr_threshold_age, options.tie_rule);
  choice.near_threshold = std::abs(per_cp - choice.threshold) < options.near_band;
  if (choice.near_threshold) {
    choice.alternative = NsrPolicy(
        layout_requests(K, config.num_errhs, per_cp, other(choice.layout), options.designated_errh), rates,
        options.nsr_threshold_age, options.tie_rule);
  }
  return choice;
}

NsrPolicy optimal_nsr(const NetworkConfig& config, double b_total, double r_total, int z,
                      const OptimalOptions& options, const JcEvaluator& evaluator) {
  OptimalOptions opts = options;
  opts.nsr_threshold_age = z;
  return std::get<NsrPolicy>(optimal_nsr_choice(config, b_total, r_total, opts, evaluator).policy);
}

// ---------------------------------------------------------------------------

std::vector<double> linspace(double start, double stop, int count) {
  std::vector<double> out;
  if (count <= 0) return out;
  if (count == 1) return {start};
  out.reserve(count);
  for (int i = 0; i < count; ++i) {
    out.push_back(i == count - 1 ? stop : start + (stop - start) * i / (count - 1));
  }
  return out;
}

double SweepRow::metric(std::string_view name) const {
  if (name == "je_theory") return je_theory;
  if (name == "je_sim") return je_sim;
  if (name == "jc_sim") return jc_sim;
  if (name == "jc_bound_fresh") return jc_bound_fresh;
  if (name == "jc_bound_replace") return jc_bound_replace;
  if (name == "jc_bound_min") return std::min(jc_bound_fresh, jc_bound_replace);
  throw std::invalid_argument("unknown metric '" + std::string(name) + "'");
}

namespace {

struct PointParams {
  PolicyClass cls;
  int z;
  std::vector<double> cp_rates;
  std::vector<double> command_rates;
  double b_total;
  double r_total;
  std::optional<double> split_fraction;
  std::optional<double> split_absolute;
};

bool is_known_axis(const std::string& name) {
  static const char* kNames[] = {"split", "split_fraction", "split_index", "b_k", "b1",
                                 "r1",    "b_total",        "r_total",     "z",   "class"};
  return std::any_of(std::begin(kNames), std::end(kNames), [&](const char* n) { return name == n; });
}

PointParams point_params(const SweepSpec& spec, const NetworkConfig& config,
                         const std::vector<double>& values) {
  const int K = config.num_cps;
  if (static_cast<int>(spec.cp_rates.size()) != K || static_cast<int>(spec.command_rates.size()) != K) {
    throw DimensionError("sweep base rates must have K entries");
  }
  PointParams p{spec.policy_class, spec.threshold, spec.cp_rates, spec.command_rates, 0.0, 0.0,
                std::nullopt, std::nullopt};
  p.b_total = std::accumulate(p.cp_rates.begin(), p.cp_rates.end(), 0.0);
  p.r_total = std::accumulate(p.command_rates.begin(), p.command_rates.end(), 0.0);
  auto value_of = [&](std::string_view name) -> std::optional<double> {
    for (std::size_t i = 0; i < spec.axes.size(); ++i) {
      if (spec.axes[i].name == name) return values[i];
    }
    return std::nullopt;
  };
  auto share_rest = [K](std::vector<double>& v, double head, double total) {
    v[0] = head;
    for (int k = 1; k < K; ++k) v[k] = (total - head) / (K - 1);
  };

  if (auto x = value_of("class")) p.cls = *x >= 0.5 ? PolicyClass::kNsr : PolicyClass::kOsr;
  if (auto x = value_of("z")) p.z = static_cast<int>(std::lround(*x));
  if (auto x = value_of("b_total")) {
    p.b_total = *x;
    p.cp_rates.assign(K, *x / K);
  }
  if (auto x = value_of("r_total")) {
    p.r_total = *x;
    p.command_rates.assign(K, *x / K);
  }
  if (auto x = value_of("b_k")) {
    p.cp_rates.assign(K, *x);
    p.b_total = *x * K;
  }
  if (auto x = value_of("b1")) share_rest(p.cp_rates, *x, p.b_total);
  if (auto x = value_of("r1")) share_rest(p.command_rates, *x, p.r_total);
  if (auto x = value_of("split")) p.split_absolute = *x;
  if (auto x = value_of("split_fraction")) p.split_fraction = *x;
  if (auto x = value_of("split_index")) p.split_fraction = *x / spec.split_resolution;
  return p;
}

Policy build_point_policy(const SweepSpec& spec, const NetworkConfig& config, const PointParams& p) {
  const int K = config.num_cps;
  const int N = config.num_errhs;
  if (spec.optimal_policies) {
    OptimalOptions opts;
    opts.nsr_threshold_age = p.z;
    opts.tie_rule = spec.tie_rule;
    if (p.cls == PolicyClass::kOsr) return optimal_osr_choice(config, p.b_total, p.r_total, opts).policy;
    // Grid evaluation stays closed-form: the NSR layout uses the same
    // two-slot threshold estimate as the oblivious class.
    opts.threshold = threshold_w_approx(p.r_total, K).value;
    return optimal_nsr_choice(config, p.b_total, p.r_total, opts).policy;
  }

  RequestRates b(K, N, 0.0);
  for (int k = 0; k < K; ++k) {
    const double bk = p.cp_rates[k];
    double head = bk / N;
    if (p.split_absolute) head = *p.split_absolute;
    if (p.split_fraction) head = *p.split_fraction * bk;
    if (N == 1) {
      b(k, 0) = head;
      continue;
    }
    b(k, 0) = head;
    for (int n = 1; n < N; ++n) b(k, n) = (bk - head) / (N - 1);
  }
  return make_policy(p.cls, std::move(b), p.command_rates, p.z, spec.tie_rule);
}

}  // namespace

Policy resolve_sweep_point(const SweepSpec& spec, const NetworkConfig& config,
                           const std::vector<double>& axis_values) {
  return build_point_policy(spec, config, point_params(spec, config, axis_values));
}

SweepResult sweep(const SweepSpec& spec, const NetworkConfig& config) {
  config.validate();
  SweepResult result;
  result.config = config;
  result.argmin_metric = spec.argmin_metric;
  for (const auto& axis : spec.axes) {
    if (!is_known_axis(axis.name)) throw std::invalid_argument("unknown sweep axis '" + axis.name + "'");
    result.axis_names.push_back(axis.name);
  }
  if (spec.modes.simulate) spec.simulation.validate();
  (void)SweepRow{}.metric(spec.argmin_metric);  // reject unknown metric names early

  bool empty = spec.axes.empty();
  for (const auto& axis : spec.axes) empty = empty || axis.values.empty();
  if (empty) return result;

  std::vector<std::size_t> cursor(spec.axes.size(), 0);
  std::size_t point = 0;
  while (true) {
    SweepRow row;
    for (std::size_t i = 0; i < spec.axes.size(); ++i) row.axis_values.push_back(spec.axes[i].values[cursor[i]]);
    row.seed = spec.common_random_numbers ? spec.simulation.seed
                                          : stream_seed(spec.simulation.seed, (point + 1) << 20);
    try {
      const PointParams params = point_params(spec, config, row.axis_values);
      row.policy_class = params.cls;
      row.threshold = params.z;
      const Policy policy = build_point_policy(spec, config, params);
      row.requests = requests_of(policy);
      const auto r = command_rates_of(policy);
      row.command_rates.assign(r.begin(), r.end());
      const auto violations = validate_feasible(policy, config);
      if (!violations.empty()) {
        row.status = "infeasible:";
        for (const auto& v : violations) row.status += " " + v.detail + ";";
      } else {
        if (spec.modes.analytic) {
          if (const auto* osr = std::get_if<OsrPolicy>(&policy)) {
            row.je_theory = je_closed_form(*osr, config);
          } else {
            row.je_theory = je_closed_form_nsr(std::get<NsrPolicy>(policy), config);
          }
        }
        if (spec.modes.bounds) {
          if (const auto* osr = std::get_if<OsrPolicy>(&policy)) {
            row.jc_bound_fresh = jc_upper_bound_fresh(*osr, config);
            row.jc_bound_replace = jc_upper_bound_replace(*osr, config);
          } else {
            const NsrBounds b = jc_upper_bounds_nsr(std::get<NsrPolicy>(policy), config);
            row.jc_bound_fresh = b.fresh;
            row.jc_bound_replace = b.replace;
          }
        }
        if (spec.modes.simulate) {
          RunParams params_sim = spec.simulation;
          params_sim.seed = row.seed;
          const SimStats stats = run(config, policy, params_sim);
          row.je_sim = stats.je_hat;
          row.jc_sim = stats.jc_hat;
          row.stderr_je = stats.stderr_je;
          row.stderr_jc = stats.stderr_jc;
        }
      }
    } catch (const std::exception& e) {
      row.status = std::string("error: ") + e.what();
    }
    result.rows.push_back(std::move(row));
    ++point;

    // Odometer increment, last axis fastest.
    std::size_t axis = spec.axes.size();
    bool done = true;
    while (axis > 0) {
      --axis;
      if (++cursor[axis] < spec.axes[axis].values.size()) {
        done = false;
        break;
      }
      cursor[axis] = 0;
    }
    if (done) break;
  }

  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < result.rows.size(); ++i) {
    const SweepRow& row = result.rows[i];
    if (row.status != "ok") continue;
    const double v = row.metric(spec.argmin_metric);
    if (std::isnan(v)) continue;
    if (!result.argmin || v < best) {
      best = v;
      result.argmin = i;
    }
  }
  return result;
}

}  // namespace fran_aoi
