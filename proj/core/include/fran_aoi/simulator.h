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

// Slot-by-slot Monte-Carlo simulation of the request/command/content
// protocol. Ages are kept untruncated; the NSR threshold only gates the
// command-rate rule.

#ifndef FRAN_AOI_SIMULATOR_H_
#define FRAN_AOI_SIMULATOR_H_

#include <cstdint>
#include <span>
#include <vector>

#include "fran_aoi/model.h"
#include "fran_aoi/rng.h"
#include "fran_aoi/table.h"

namespace fran_aoi {

inline constexpr int kNoRequest = -1;

struct AgeState {
  Table<std::int64_t> g;  // N x K, eRRH side
  Table<std::int64_t> h;  // M x K, CU side

  // All ages equal to one.
  static AgeState initial(const NetworkConfig& config);

  friend bool operator==(const AgeState&, const AgeState&) = default;
};

struct SlotDecisions {
  Table<int> beta;            // M x K: targeted eRRH or kNoRequest
  Table<std::uint8_t> gamma;  // N x K: command issued this slot
};

// One categorical draw per (m, k) over {eRRH 0..N-1, none} with
// probabilities (b_k^(0), ..., b_k^(N-1), 1 - b_k).
Table<int> sample_requests(const RequestRates& requests, int num_cus, Rng& rng);

// Command rates an NSR eRRH applies given its current age row.
std::vector<double> nsr_command_rates(std::span<const std::int64_t> g_row, const NsrPolicy& policy);

// Reusable single-trajectory engine. Each advance() performs one synchronous
// slot update from the pre-slot ages.
class ProtocolStepper {
 public:
  // Throws DimensionError if the policy does not match the network.
  ProtocolStepper(const NetworkConfig& config, const Policy& policy);

  void reset();
  void set_state(const AgeState& state);
  void advance(Rng& rng);

  const AgeState& state() const { return state_; }
  const SlotDecisions& decisions() const { return decisions_; }
  const NetworkConfig& config() const { return config_; }

 private:
  NetworkConfig config_;
  bool nsr_;
  std::vector<double> command_rates_;
  std::int64_t threshold_ = 1;
  TieRule tie_rule_ = TieRule::kMeanRate;
  Table<double> cumulative_;  // K x N running sums of b_k^(n)
  AgeState state_;
  SlotDecisions decisions_;
  Table<std::uint8_t> targeted_;
  std::vector<double> row_rates_;
};

AgeState step(const AgeState& state, const Policy& policy, const NetworkConfig& config, Rng& rng);

struct RunParams {
  std::int64_t slots = 1'000'000;  // T
  std::int64_t warmup = 10'000;    // W
  int replications = 20;
  std::uint64_t seed = 1;
  int threads = 1;

  // Throws std::invalid_argument unless T > W >= 0 and replications >= 1.
  void validate() const;
};

struct SimStats {
  double je_hat = 0.0;
  double jc_hat = 0.0;
  Table<double> per_pair_g;  // N x K
  Table<double> per_pair_h;  // M x K
  double stderr_je = 0.0;    // zero for a single replication
  double stderr_jc = 0.0;
  std::int64_t slots_used = 0;  // averaged slots per replication, T - W
  std::int64_t warmup = 0;
  int replications = 0;
  std::uint64_t seed = 0;
};

// Averages g and h over slots (W, T] of each replication; replication i is
// seeded with stream_seed(seed, i). Output is bit-identical for any thread
// count. Throws InfeasiblePolicyError before simulating an infeasible policy.
SimStats run(const NetworkConfig& config, const Policy& policy, const RunParams& params);

}  // namespace fran_aoi

#endif  // FRAN_AOI_SIMULATOR_H_
