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

// Truncated-age Markov chain for age-ranked (NSR) command policies.
//
// One chain per eRRH n over phi in {1..z}^K. States are enumerated
// row-major with the first CP most significant:
//   index(phi) = sum_k (phi_k - 1) * z^(K-1-k).
// The transition matrix is column-stochastic: P(to, from), so pi = P pi.

#ifndef FRAN_AOI_NSR_ANALYSIS_H_
#define FRAN_AOI_NSR_ANALYSIS_H_

#include <Eigen/Dense>
#include <Eigen/SparseCore>
#include <cstdint>
#include <filesystem>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "fran_aoi/model.h"

namespace fran_aoi {

using SparseMatrix = Eigen::SparseMatrix<double, Eigen::ColMajor, std::int64_t>;

class CapacityError : public std::length_error {
 public:
  using std::length_error::length_error;
};

// The chain has more than one closed class, so pi is not unique.
class ReducibleChainError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Some state cannot reach a reset of the requested CP with probability one.
class UnreachableResetError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class StateSpace {
 public:
  static constexpr std::int64_t kDefaultCapacity = 1'000'000;

  // Throws std::invalid_argument for K < 1 or z < 1 and CapacityError when
  // z^K exceeds `capacity`.
  StateSpace(int num_cps, int threshold, std::int64_t capacity = kDefaultCapacity);

  int num_cps() const { return num_cps_; }
  int threshold() const { return threshold_; }
  std::int64_t size() const { return size_; }

  void decode(std::int64_t index, std::span<std::int64_t> ages) const;
  std::vector<std::int64_t> decode(std::int64_t index) const;
  std::int64_t encode(std::span<const std::int64_t> ages) const;

 private:
  int num_cps_;
  int threshold_;
  std::int64_t size_;
};

StateSpace build_state_space(int num_cps, int threshold,
                             std::int64_t capacity = StateSpace::kDefaultCapacity);

// Command rates in truncated state phi; same rule as the simulator.
std::vector<double> classify_rates(std::span<const std::int64_t> phi, const NsrPolicy& policy);

// Chain of eRRH n: coordinate k resets to 1 with probability
// classify_rates(phi)[k] * zeta_nk, otherwise advances to min(phi_k + 1, z),
// independently across k.
SparseMatrix transition_matrix(const NsrPolicy& policy, int n, const NetworkConfig& config,
                               const StateSpace& space);

struct SolverOptions {
  std::int64_t dense_limit = 10'000;  // dense LU up to this many states
  double tolerance = 1e-12;           // iterative fallback
  std::int64_t max_iterations = 1'000'000;
};

// Solves pi = P pi, sum(pi) = 1. `space` is only used to name the offending
// CP when the chain turns out reducible.
Eigen::VectorXd steady_state(const SparseMatrix& transitions, const SolverOptions& options = {},
                             const StateSpace* space = nullptr);

// Expected slots until coordinate k next resets, from every state; entries
// are +inf where a reset is not reached with probability one.
Eigen::VectorXd hitting_times(const SparseMatrix& transitions, const StateSpace& space, int k,
                              const SolverOptions& options = {});

// Same as hitting_times but throws UnreachableResetError on any infinite entry.
Eigen::VectorXd first_passage(const SparseMatrix& transitions, const StateSpace& space, int k,
                              const SolverOptions& options = {});

struct MarkovModel {
  StateSpace space;
  SparseMatrix transitions;
  Eigen::VectorXd pi;
  std::vector<Eigen::VectorXd> first_passage;  // one table per CP, may hold +inf
  std::vector<double> mean_age;                // sum_phi F_k(phi) pi_phi
  double residual = 0.0;                       // ||P pi - pi||_inf
};

MarkovModel build_markov_model(const NsrPolicy& policy, int n, const NetworkConfig& config,
                               const SolverOptions& options = {});

// (1/(NK)) sum_n sum_k sum_phi F_nk(phi) pi_phi. Returns kInfiniteAoi if any
// eRRH/CP pair is never refreshed.
double je_closed_form_nsr(const NsrPolicy& policy, const NetworkConfig& config,
                          const SolverOptions& options = {});

struct NsrBounds {
  double fresh = kInfiniteAoi;
  double replace = kInfiniteAoi;
};

// Both bounds use the smallest command rate r_K; they are infinite when
// r_K == 0 or some b_k == 0.
NsrBounds jc_upper_bounds_nsr(const NsrPolicy& policy, const NetworkConfig& config,
                              const SolverOptions& options = {});

// Writes <prefix>_states.csv (index -> age tuple), <prefix>_P.csv,
// <prefix>_pi.csv and <prefix>_F.csv into `dir`.
void write_chain_csv(const MarkovModel& model, const std::filesystem::path& dir,
                     const std::string& prefix);

}  // namespace fran_aoi

#endif  // FRAN_AOI_NSR_ANALYSIS_H_
