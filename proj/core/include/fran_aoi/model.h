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

// Network dimensions, stationary randomized policies, feasibility checks and
// the rate algebra shared by the simulator and the analytical modules.
//
// Index conventions: CUs m in [0, M), eRRHs n in [0, N), CPs k in [0, K).
// Request rates are stored CP-major, i.e. requests(k, n) = b_k^(n).

#ifndef FRAN_AOI_MODEL_H_
#define FRAN_AOI_MODEL_H_

#include <cmath>
#include <cstdint>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "fran_aoi/table.h"

namespace fran_aoi {

// Absolute slack used by every feasibility comparison, so that boundary
// policies such as sum_k r_k == R validate.
inline constexpr double kFeasibilitySlack = 1e-12;

// Average age of a process that is never refreshed.
inline constexpr double kInfiniteAoi = std::numeric_limits<double>::infinity();

inline bool is_infinite_aoi(double value) { return std::isinf(value) && value > 0; }

// Policy matrices do not match the network they are evaluated against.
class DimensionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct NetworkConfig {
  int num_cus = 2;     // M
  int num_errhs = 2;   // N
  int num_cps = 2;     // K
  double request_budget = 2.0;  // B, per CU
  double command_budget = 2.0;  // R, per eRRH

  // Throws std::invalid_argument on non-positive counts or bad budgets.
  void validate() const;

  friend bool operator==(const NetworkConfig&, const NetworkConfig&) = default;
};

// Per-CU request probabilities b_k^(n); identical for every CU.
class RequestRates {
 public:
  RequestRates() = default;
  RequestRates(int num_cps, int num_errhs, double fill = 0.0);

  // rows[k][n] = b_k^(n). Throws DimensionError on empty or ragged input.
  static RequestRates from_rows(const std::vector<std::vector<double>>& rows);

  int num_cps() const { return rates_.rows(); }
  int num_errhs() const { return rates_.cols(); }

  double operator()(int k, int n) const { return rates_(k, n); }
  double& operator()(int k, int n) { return rates_(k, n); }

  std::span<const double> cp_row(int k) const { return rates_.row(k); }
  std::vector<std::vector<double>> to_rows() const;

  friend bool operator==(const RequestRates&, const RequestRates&) = default;

 private:
  Table<double> rates_;
};

struct OsrPolicy {
  RequestRates requests;
  std::vector<double> command_rates;  // r_k, one per CP
};

// How equal ages below the threshold share command rates.
enum class TieRule {
  kMeanRate,     // tied CPs each get the mean of the rates their ranks span
  kStrictOrder,  // ties broken by CP index, lower index ranks as older
};

std::string_view to_string(TieRule rule);
// Accepts "appendix-e" / "mean" and "strict-order" / "strict".
TieRule parse_tie_rule(std::string_view text);

// Age-ranked policy: the j-th oldest CP at an eRRH is commanded with rate
// r_j, and every CP gets r_0 = mean(r) once all ages reach the threshold.
class NsrPolicy {
 public:
  // Sorts command_rates non-increasing and derives r_0.
  // Throws std::invalid_argument if threshold < 1.
  NsrPolicy(RequestRates requests, std::vector<double> command_rates, int threshold,
            TieRule tie_rule = TieRule::kMeanRate);

  const RequestRates& requests() const { return requests_; }
  std::span<const double> command_rates() const { return command_rates_; }
  int threshold() const { return threshold_; }
  double tie_rate() const { return tie_rate_; }
  TieRule tie_rule() const { return tie_rule_; }

 private:
  RequestRates requests_;
  std::vector<double> command_rates_;
  int threshold_;
  double tie_rate_;
  TieRule tie_rule_;
};

using Policy = std::variant<OsrPolicy, NsrPolicy>;

const RequestRates& requests_of(const Policy& policy);
std::span<const double> command_rates_of(const Policy& policy);
bool is_nsr(const Policy& policy);

struct Violation {
  std::string constraint;  // stable identifier, e.g. "request_budget"
  std::string detail;      // human-readable, e.g. "sum_n b_1^(n) = 1.4 > 1"
};

// Lists every violated constraint of the feasible region; empty means
// feasible. Throws DimensionError when the policy does not match config.
std::vector<Violation> validate_feasible(const Policy& policy, const NetworkConfig& config);

class InfeasiblePolicyError : public std::invalid_argument {
 public:
  explicit InfeasiblePolicyError(std::vector<Violation> violations);
  const std::vector<Violation>& violations() const { return violations_; }

 private:
  std::vector<Violation> violations_;
};

// Throws InfeasiblePolicyError (or DimensionError) unless feasible.
void require_feasible(const Policy& policy, const NetworkConfig& config);

struct RateAggregates {
  std::vector<double> per_cp;  // b_k
  double total = 0.0;          // b
};

RateAggregates aggregate_rates(const RequestRates& requests);

// Probability that an eRRH sees at least one request for a CP in a slot
// when each of num_cus CUs targets it independently with probability rate.
double zeta(double rate, int num_cus);
double zeta(const RequestRates& requests, int n, int k, int num_cus);

// Age-ranked command rates for one eRRH. sorted_rates must be non-increasing.
// If every age is >= threshold all CPs get mean(sorted_rates); otherwise the
// CP with the j-th largest age gets sorted_rates[j], ties per `rule`.
void assign_ranked_rates(std::span<const std::int64_t> ages, std::span<const double> sorted_rates,
                         std::int64_t threshold, TieRule rule, std::span<double> out);

}  // namespace fran_aoi

#endif  // FRAN_AOI_MODEL_H_
