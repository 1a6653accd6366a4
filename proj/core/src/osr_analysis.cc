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

#include "fran_aoi/osr_analysis.h"

namespace fran_aoi {
namespace {

void check(const OsrPolicy& policy, const NetworkConfig& config) {
  config.validate();
  if (policy.requests.num_cps() != config.num_cps || policy.requests.num_errhs() != config.num_errhs ||
      static_cast<int>(policy.command_rates.size()) != config.num_cps) {
    throw DimensionError("policy dimensions do not match the network");
  }
}

}  // namespace

double je_closed_form(const OsrPolicy& policy, const NetworkConfig& config) {
  check(policy, config);
  double sum = 0.0;
  for (int n = 0; n < config.num_errhs; ++n) {
    for (int k = 0; k < config.num_cps; ++k) {
      const double p = policy.command_rates[k] * zeta(policy.requests, n, k, config.num_cus);
      if (p <= 0.0) return kInfiniteAoi;
      sum += 1.0 / p;
    }
  }
  return sum / (config.num_errhs * config.num_cps);
}

double jc_upper_bound_fresh(const OsrPolicy& policy, const NetworkConfig& config) {
  check(policy, config);
  const RateAggregates agg = aggregate_rates(policy.requests);
  double sum = 0.0;
  for (int k = 0; k < config.num_cps; ++k) {
    const double p = agg.per_cp[k] * policy.command_rates[k];
    if (p <= 0.0) return kInfiniteAoi;
    sum += 1.0 / p;
  }
  return sum / config.num_cps;
}

double jc_upper_bound_replace(const OsrPolicy& policy, const NetworkConfig& config) {
  check(policy, config);
  const RateAggregates agg = aggregate_rates(policy.requests);
  double sum = 0.0;
  for (int k = 0; k < config.num_cps; ++k) {
    const double bk = agg.per_cp[k];
    const double rk = policy.command_rates[k];
    if (bk * rk <= 0.0) return kInfiniteAoi;
    double term = (1.0 - bk + bk * rk) / (bk * rk);
    for (int n = 0; n < config.num_errhs; ++n) {
      const double bkn = policy.requests(k, n);
      if (bkn <= 0.0) continue;
      term += bkn * (1.0 - rk) / (rk * zeta(bkn, config.num_cus));
    }
    sum += term;
  }
  return sum / config.num_cps;
}

}  // namespace fran_aoi
