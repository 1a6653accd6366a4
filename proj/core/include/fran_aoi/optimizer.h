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

// Optimal-policy construction, request-consolidation threshold search and
// grid sweeps over policy parameters.

#ifndef FRAN_AOI_OPTIMIZER_H_
#define FRAN_AOI_OPTIMIZER_H_

#include <cstddef>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "fran_aoi/model.h"
#include "fran_aoi/simulator.h"

namespace fran_aoi {

enum class PolicyClass { kOsr, kNsr };

std::string_view to_string(PolicyClass cls);
PolicyClass parse_policy_class(std::string_view text);

struct ThresholdEstimate {
  double value = 0.0;
  bool heuristic = false;  // true when extrapolated beyond K = 2
};

// w(r/K) ~= 2/(3 - r/K). Exact form of the two-slot estimate for K = 2.
// Throws std::invalid_argument unless r_total/K lies in [0, 1].
ThresholdEstimate threshold_w_approx(double r_total, int num_cps);

enum class RequestLayout { kEvenSplit, kConsolidated };

std::string_view to_string(RequestLayout layout);

// b_k = per_cp for every CP, either split evenly (per_cp/N each) or placed
// entirely on `designated` eRRH.
RequestRates layout_requests(int num_cps, int num_errhs, double per_cp, RequestLayout layout,
                             int designated = 0);

struct OptimalOptions {
  std::optional<double> threshold;  // skip estimation
  int designated_errh = 0;
  double near_band = 0.05;          // |b/K - w| below this emits both layouts
  int nsr_threshold_age = 3;        // z
  TieRule tie_rule = TieRule::kMeanRate;
};

struct OptimalChoice {
  Policy policy;
  RequestLayout layout = RequestLayout::kEvenSplit;
  double threshold = 0.0;
  bool heuristic_threshold = false;
  bool crossover_found = true;
  bool near_threshold = false;
  std::optional<Policy> alternative;  // other layout when near_threshold
};

// Maps an estimated J_c for a policy. Evaluators may throw.
using JcEvaluator = std::function<double(const Policy&)>;

// Simulated J_c with a fixed budget and seed.
JcEvaluator simulation_evaluator(const NetworkConfig& config, const RunParams& params);
// min(fresh, replace) upper bound of the matching policy class.
JcEvaluator bound_evaluator(const NetworkConfig& config);

struct ThresholdProbe {
  double per_cp_rate = 0.0;
  double jc_consolidated = 0.0;
  double jc_even = 0.0;
};

struct EmpiricalThreshold {
  double value = 0.0;
  bool crossover_found = false;  // false: value is the approximation formula
  std::vector<ThresholdProbe> probes;
};

inline constexpr double kThresholdTolerance = 1.0 / 128.0;

// Bisection on b_k in [0, 1] for the point where the even split starts to
// beat consolidation. The evaluator must accept any b_k in [0, 1], so its
// config needs B >= K.
EmpiricalThreshold empirical_threshold(const NetworkConfig& config, double r_total, PolicyClass cls,
                                       const JcEvaluator& evaluator, int nsr_threshold_age = 3,
                                       TieRule tie_rule = TieRule::kMeanRate);

// Optimal-policy constructions. Throw InfeasiblePolicyError when (b, r) lies
// outside the budgets or b/K > 1 (or r > 1 for the NSR head rate).
OptimalChoice optimal_osr_choice(const NetworkConfig& config, double b_total, double r_total,
                                 const OptimalOptions& options = {});
OsrPolicy optimal_osr(const NetworkConfig& config, double b_total, double r_total,
                      const OptimalOptions& options = {});

// Without options.threshold the threshold comes from empirical_threshold
// using `evaluator`, or a default simulation evaluator when it is empty.
OptimalChoice optimal_nsr_choice(const NetworkConfig& config, double b_total, double r_total,
                                 const OptimalOptions& options = {}, const JcEvaluator& evaluator = {});
NsrPolicy optimal_nsr(const NetworkConfig& config, double b_total, double r_total, int z,
                      const OptimalOptions& options = {}, const JcEvaluator& evaluator = {});

// Default budget for threshold probing by simulation.
RunParams default_threshold_budget();

// ---------------------------------------------------------------------------
// Sweeps

// Supported axis names:
//   split           b_k^(1) (absolute, every k); rest of b_k spread over n >= 2
//   split_fraction  b_k^(1) = x * b_k
//   split_index     b_k^(1) = x / split_resolution * b_k
//   b_k             b_k = x for every k
//   b1              b_1 = x, other CPs share b_total - x
//   r1              r_1 = x, other CPs share r_total - x
//   b_total         b_k = x / K
//   r_total         r_k = x / K
//   z               NSR threshold
//   class           0 = OSR, 1 = NSR
struct SweepAxis {
  std::string name;
  std::vector<double> values;
};

std::vector<double> linspace(double start, double stop, int count);

struct EvaluationModes {
  bool simulate = true;
  bool analytic = true;
  bool bounds = true;
};

struct SweepSpec {
  PolicyClass policy_class = PolicyClass::kOsr;
  std::vector<double> cp_rates{0.8, 0.8};         // b_k
  std::vector<double> command_rates{0.4, 0.2};    // r_k
  int threshold = 3;                              // z
  TieRule tie_rule = TieRule::kMeanRate;
  int split_resolution = 20;
  bool optimal_policies = false;  // build each point with optimal_*_choice
  std::vector<SweepAxis> axes;
  EvaluationModes modes;
  RunParams simulation;
  bool common_random_numbers = true;  // every point reuses simulation.seed
  std::string argmin_metric = "jc_sim";
};

inline constexpr double kNotEvaluated = std::numeric_limits<double>::quiet_NaN();

struct SweepRow {
  std::vector<double> axis_values;
  PolicyClass policy_class = PolicyClass::kOsr;
  int threshold = 3;
  RequestRates requests;
  std::vector<double> command_rates;
  double je_theory = kNotEvaluated;
  double je_sim = kNotEvaluated;
  double jc_sim = kNotEvaluated;
  double jc_bound_fresh = kNotEvaluated;
  double jc_bound_replace = kNotEvaluated;
  double stderr_je = kNotEvaluated;
  double stderr_jc = kNotEvaluated;
  std::uint64_t seed = 0;
  std::string status = "ok";

  double metric(std::string_view name) const;
};

struct SweepResult {
  NetworkConfig config;
  std::vector<std::string> axis_names;
  std::vector<SweepRow> rows;
  std::optional<std::size_t> argmin;  // over rows with status "ok"
  std::string argmin_metric;
};

// Evaluates the Cartesian product of the axes (first axis outermost).
// Per-point failures land in SweepRow::status; an axis with no values
// (or no axes at all) gives an empty table.
SweepResult sweep(const SweepSpec& spec, const NetworkConfig& config);

// Builds the policy of one grid point without evaluating it.
Policy resolve_sweep_point(const SweepSpec& spec, const NetworkConfig& config,
                           const std::vector<double>& axis_values);

}  // namespace fran_aoi

#endif  // FRAN_AOI_OPTIMIZER_H_
