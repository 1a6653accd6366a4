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

#include "fran_aoi/model.h"

#include <algorithm>
#include <array>
#include <numeric>
#include <sstream>
#include <utility>

namespace fran_aoi {
namespace {

std::string fmt_num(double v) {
  std::ostringstream os;
  os << v;
  return os.str();
}

std::string join_details(const std::vector<Violation>& violations) {
  std::string out = "infeasible policy:";
  for (const auto& v : violations) {
    out += " [" + v.constraint + "] " + v.detail + ";";
  }
  return out;
}

}  // namespace

void NetworkConfig::validate() const {
  if (num_cus < 1 || num_errhs < 1 || num_cps < 1) {
    throw std::invalid_argument("network counts M, N, K must be >= 1");
  }
  if (!std::isfinite(request_budget) || request_budget < 0.0) {
    throw std::invalid_argument("request budget B must be finite and non-negative");
  }
  if (!std::isfinite(command_budget) || command_budget < 0.0) {
    throw std::invalid_argument("command budget R must be finite and non-negative");
  }
}

RequestRates::RequestRates(int num_cps, int num_errhs, double fill)
    : rates_(num_cps, num_errhs, fill) {
  if (num_cps < 1 || num_errhs < 1) {
    throw DimensionError("request rates need at least one CP and one eRRH");
  }
}

RequestRates RequestRates::from_rows(const std::vector<std::vector<double>>& rows) {
  if (rows.empty() || rows.front().empty()) {
    throw DimensionError("request rate matrix is empty");
  }
  const int cols = static_cast<int>(rows.front().size());
  RequestRates out(static_cast<int>(rows.size()), cols);
  for (int k = 0; k < out.num_cps(); ++k) {
    if (static_cast<int>(rows[k].size()) != cols) {
      throw DimensionError("request rate matrix is ragged at CP " + std::to_string(k + 1));
    }
    for (int n = 0; n < cols; ++n) out(k, n) = rows[k][n];
  }
  return out;
}

std::vector<std::vector<double>> RequestRates::to_rows() const {
  std::vector<std::vector<double>> rows(num_cps());
  for (int k = 0; k < num_cps(); ++k) {
    auto r = cp_row(k);
    rows[k].assign(r.begin(), r.end());
  }
  return rows;
}

std::string_view to_string(TieRule rule) {
  switch (rule) {
    case TieRule::kMeanRate:
      return "appendix-e";
    case TieRule::kStrictOrder:
      return "strict-order";
  }
  return "appendix-e";
}

TieRule parse_tie_rule(std::string_view text) {
  if (text == "appendix-e" || text == "mean") return TieRule::kMeanRate;
  if (text == "strict-order" || text == "strict") return TieRule::kStrictOrder;
  throw std::invalid_argument("unknown tie rule '" + std::string(text) + "'");
}

NsrPolicy::NsrPolicy(RequestRates requests, std::vector<double> command_rates, int threshold,
                     TieRule tie_rule)
    : requests_(std::move(requests)),
      command_rates_(std::move(command_rates)),
      threshold_(threshold),
      tie_rate_(0.0),
      tie_rule_(tie_rule) {
  if (threshold_ < 1) {
    throw std::invalid_argument("NSR threshold z must be >= 1, got " + std::to_string(threshold_));
  }
  std::sort(command_rates_.begin(), command_rates_.end(), std::greater<>());
  if (!command_rates_.empty()) {
    tie_rate_ = std::accumulate(command_rates_.begin(), command_rates_.end(), 0.0) /
                static_cast<double>(command_rates_.size());
  }
}

const RequestRates& requests_of(const Policy& policy) {
  return std::visit(
      [](const auto& p) -> const RequestRates& {
        if constexpr (std::is_same_v<std::decay_t<decltype(p)>, OsrPolicy>) {
          return p.requests;
        } else {
          return p.requests();
        }
      },
      policy);
}

std::span<const double> command_rates_of(const Policy& policy) {
  return std::visit(
      [](const auto& p) -> std::span<const double> {
        if constexpr (std::is_same_v<std::decay_t<decltype(p)>, OsrPolicy>) {
          return p.command_rates;
        } else {
          return p.command_rates();
        }
      },
      policy);
}

bool is_nsr(const Policy& policy) { return std::holds_alternative<NsrPolicy>(policy); }

std::vector<Violation> validate_feasible(const Policy& policy, const NetworkConfig& config) {
  config.validate();
  const RequestRates& b = requests_of(policy);
  const auto r = command_rates_of(policy);
  const int K = config.num_cps;
  const int N = config.num_errhs;
  if (b.num_cps() != K || b.num_errhs() != N) {
    throw DimensionError("request matrix is " + std::to_string(b.num_cps()) + "x" +
                         std::to_string(b.num_errhs()) + ", network expects K x N = " +
                         std::to_string(K) + "x" + std::to_string(N));
  }
  if (static_cast<int>(r.size()) != K) {
    throw DimensionError("command rate vector has " + std::to_string(r.size()) +
                         " entries, network has K = " + std::to_string(K));
  }

  std::vector<Violation> out;
  for (int k = 0; k < K; ++k) {
    for (int n = 0; n < N; ++n) {
      const double v = b(k, n);
      if (!(v >= -kFeasibilitySlack && v <= 1.0 + kFeasibilitySlack)) {
        out.push_back({"rate_range", "b_" + std::to_string(k + 1) + "^(" + std::to_string(n + 1) +
                                         ") = " + fmt_num(v) + " outside [0, 1]"});
      }
    }
  }
  for (int k = 0; k < K; ++k) {
    const double v = r[k];
    if (!(v >= -kFeasibilitySlack && v <= 1.0 + kFeasibilitySlack)) {
      out.push_back({"rate_range", "r_" + std::to_string(k + 1) + " = " + fmt_num(v) + " outside [0, 1]"});
    }
  }

  const RateAggregates agg = aggregate_rates(b);
  for (int k = 0; k < K; ++k) {
    if (agg.per_cp[k] > 1.0 + kFeasibilitySlack) {
      out.push_back({"cp_request_simplex", "sum_n b_" + std::to_string(k + 1) +
                                               "^(n) = " + fmt_num(agg.per_cp[k]) + " > 1"});
    }
  }
  if (agg.total > config.request_budget + kFeasibilitySlack) {
    out.push_back({"request_budget",
                   "b = " + fmt_num(agg.total) + " > B = " + fmt_num(config.request_budget)});
  }
  const double r_total = std::accumulate(r.begin(), r.end(), 0.0);
  if (r_total > config.command_budget + kFeasibilitySlack) {
    out.push_back({"command_budget",
                   "r = " + fmt_num(r_total) + " > R = " + fmt_num(config.command_budget)});
  }
  if (is_nsr(policy) && !std::is_sorted(r.begin(), r.end(), std::greater<>())) {
    out.push_back({"command_order", "NSR command rates are not non-increasing"});
  }
  return out;
}

InfeasiblePolicyError::InfeasiblePolicyError(std::vector<Violation> violations)
    : std::invalid_argument(join_details(violations)), violations_(std::move(violations)) {}

void require_feasible(const Policy& policy, const NetworkConfig& config) {
  auto violations = validate_feasible(policy, config);
  if (!violations.empty()) throw InfeasiblePolicyError(std::move(violations));
}

RateAggregates aggregate_rates(const RequestRates& requests) {
  RateAggregates agg;
  agg.per_cp.assign(requests.num_cps(), 0.0);
  for (int k = 0; k < requests.num_cps(); ++k) {
    const auto row = requests.cp_row(k);
    agg.per_cp[k] = std::accumulate(row.begin(), row.end(), 0.0);
    agg.total += agg.per_cp[k];
  }
  return agg;
}

double zeta(double rate, int num_cus) {
  return 1.0 - std::pow(1.0 - rate, num_cus);
}

double zeta(const RequestRates& requests, int n, int k, int num_cus) {
  return zeta(requests(k, n), num_cus);
}

void assign_ranked_rates(std::span<const std::int64_t> ages, std::span<const double> sorted_rates,
                         std::int64_t threshold, TieRule rule, std::span<double> out) {
  const std::size_t K = ages.size();
  const std::int64_t youngest = *std::min_element(ages.begin(), ages.end());
  if (youngest >= threshold) {
    const double r0 = std::accumulate(sorted_rates.begin(), sorted_rates.end(), 0.0) /
                      static_cast<double>(K);
    std::fill(out.begin(), out.end(), r0);
    return;
  }

  std::array<int, 16> small_order{};
  std::vector<int> large_order;
  std::span<int> order;
  if (K <= small_order.size()) {
    order = std::span<int>(small_order.data(), K);
  } else {
    large_order.resize(K);
    order = large_order;
  }
  std::iota(order.begin(), order.end(), 0);
  // Descending age, ties by index; insertion sort, K is small.
  for (std::size_t i = 1; i < K; ++i) {
    const int cur = order[i];
    std::size_t j = i;
    while (j > 0 && ages[order[j - 1]] < ages[cur]) {
      order[j] = order[j - 1];
      --j;
    }
    order[j] = cur;
  }

  if (rule == TieRule::kStrictOrder) {
    for (std::size_t pos = 0; pos < K; ++pos) out[order[pos]] = sorted_rates[pos];
    return;
  }
  std::size_t begin = 0;
  while (begin < K) {
    std::size_t end = begin + 1;
    while (end < K && ages[order[end]] == ages[order[begin]]) ++end;
    double sum = 0.0;
    for (std::size_t pos = begin; pos < end; ++pos) sum += sorted_rates[pos];
    const double rate = (end - begin == 1) ? sum : sum / static_cast<double>(end - begin);
    for (std::size_t pos = begin; pos < end; ++pos) out[order[pos]] = rate;
    begin = end;
  }
}

}  // namespace fran_aoi
