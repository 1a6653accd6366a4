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

// Closed-form eRRH age and the two CU age upper bounds for oblivious
// policies on an arbitrary M x N x K network. A diverging quantity is
// reported as kInfiniteAoi instead of throwing, so sweeps can carry it.

#ifndef FRAN_AOI_OSR_ANALYSIS_H_
#define FRAN_AOI_OSR_ANALYSIS_H_

#include "fran_aoi/model.h"

namespace fran_aoi {

// (1/(NK)) sum_n sum_k 1/(r_k zeta_nk).
double je_closed_form(const OsrPolicy& policy, const NetworkConfig& config);

// (1/K) sum_k 1/(b_k r_k): cached packets are never forwarded.
double jc_upper_bound_fresh(const OsrPolicy& policy, const NetworkConfig& config);

// (1/K) sum_k [(1 - b_k + b_k r_k)/(b_k r_k) + sum_n b_k^(n)(1 - r_k)/(r_k zeta_nk)]:
// a CU always takes the delivered packet, even if it is older.
// Terms with b_k^(n) == 0 contribute nothing.
double jc_upper_bound_replace(const OsrPolicy& policy, const NetworkConfig& config);

}  // namespace fran_aoi

#endif  // FRAN_AOI_OSR_ANALYSIS_H_
