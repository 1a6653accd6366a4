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

#include "fran_aoi/nsr_analysis.h"

#include <Eigen/LU>
#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <queue>
#include <sstream>

namespace fran_aoi {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Probability mass below which a steady-state entry is treated as zero when
// paired with an infinite hitting time.
constexpr double kNegligibleMass = 1e-14;

// Row-oriented view of P: successors[from] = {(to, prob)}.
struct Successors {
  std::vector<std::vector<std::pair<std::int64_t, double>>> out;
};

Successors successors_of(const SparseMatrix& P) {
  Successors s;
  s.out.resize(P.cols());
  for (std::int64_t from = 0; from < P.outerSize(); ++from) {
    for (SparseMatrix::InnerIterator it(P, from); it; ++it) {
      if (it.value() > 0.0) s.out[from].emplace_back(it.row(), it.value());
    }
  }
  return s;
}

std::string reducibility_hint(const SparseMatrix& P, const StateSpace* space) {
  if (space == nullptr) return "";
  std::ostringstream os;
  std::vector<std::int64_t> ages(space->num_cps());
  for (int k = 0; k < space->num_cps(); ++k) {
    bool never = true;
    bool always = true;
    for (std::int64_t from = 0; from < P.outerSize(); ++from) {
      double reset = 0.0;
      for (SparseMatrix::InnerIterator it(P, from); it; ++it) {
        space->decode(it.row(), ages);
        if (ages[k] == 1) reset += it.value();
      }
      if (reset > 0.0) never = false;
      if (reset < 1.0) always = false;
    }
    if (never) os << " CP " << k + 1 << " has reset probability r*zeta = 0 in every state;";
    if (always) os << " CP " << k + 1 << " has reset probability r*zeta = 1 in every state;";
  }
  return os.str();
}

double residual_inf(const SparseMatrix& P, const Eigen::VectorXd& pi) {
  return (P * pi - pi).lpNorm<Eigen::Infinity>();
}

}  // namespace

StateSpace::StateSpace(int num_cps, int threshold, std::int64_t capacity)
    : num_cps_(num_cps), threshold_(threshold), size_(1) {
  if (num_cps < 1 || threshold < 1) {
    throw std::invalid_argument("state space needs K >= 1 and z >= 1");
  }
  for (int k = 0; k < num_cps; ++k) {
    if (size_ > capacity / threshold) {
      throw CapacityError("z^K = " + std::to_string(threshold) + "^" + std::to_string(num_cps) +
                          " exceeds the state capacity " + std::to_string(capacity));
    }
    size_ *= threshold;
  }
  if (size_ > capacity) {
    throw CapacityError("state space exceeds capacity " + std::to_string(capacity));
  }
}

void StateSpace::decode(std::int64_t index, std::span<std::int64_t> ages) const {
  for (int k = num_cps_ - 1; k >= 0; --k) {
    ages[k] = index % threshold_ + 1;
    index /= threshold_;
  }
}

std::vector<std::int64_t> StateSpace::decode(std::int64_t index) const {
  std::vector<std::int64_t> ages(num_cps_);
  decode(index, ages);
  return ages;
}

std::int64_t StateSpace::encode(std::span<const std::int64_t> ages) const {
  std::int64_t index = 0;
  for (int k = 0; k < num_cps_; ++k) index = index * threshold_ + (ages[k] - 1);
  return index;
}

StateSpace build_state_space(int num_cps, int threshold, std::int64_t capacity) {
  return StateSpace(num_cps, threshold, capacity);
}

std::vector<double> classify_rates(std::span<const std::int64_t> phi, const NsrPolicy& policy) {
  std::vector<double> out(phi.size());
  assign_ranked_rates(phi, policy.command_rates(), policy.threshold(), policy.tie_rule(), out);
  return out;
}

SparseMatrix transition_matrix(const NsrPolicy& policy, int n, const NetworkConfig& config,
                               const StateSpace& space) {
  const int K = config.num_cps;
  if (space.num_cps() != K || space.threshold() != policy.threshold() ||
      policy.requests().num_cps() != K || policy.requests().num_errhs() != config.num_errhs ||
      static_cast<int>(policy.command_rates().size()) != K) {
    throw DimensionError("policy, network and state space disagree");
  }
  if (n < 0 || n >= config.num_errhs) throw DimensionError("eRRH index out of range");

  std::vector<double> z_row(K);
  for (int k = 0; k < K; ++k) z_row[k] = zeta(policy.requests(), n, k, config.num_cus);

  const std::int64_t z = space.threshold();
  const std::int64_t patterns = std::int64_t{1} << K;
  std::vector<Eigen::Triplet<double, std::int64_t>> triplets;
  triplets.reserve(static_cast<std::size_t>(space.size()) * std::min<std::int64_t>(patterns, 64));

  std::vector<std::int64_t> phi(K);
  std::vector<std::int64_t> next(K);
  std::vector<double> rates(K);
  std::vector<double> reset(K);
  for (std::int64_t from = 0; from < space.size(); ++from) {
    space.decode(from, phi);
    assign_ranked_rates(phi, policy.command_rates(), z, policy.tie_rule(), rates);
    for (int k = 0; k < K; ++k) reset[k] = rates[k] * z_row[k];
    for (std::int64_t pattern = 0; pattern < patterns; ++pattern) {
      double prob = 1.0;
      for (int k = 0; k < K; ++k) {
        if ((pattern >> k) & 1) {
          prob *= reset[k];
          next[k] = 1;
        } else {
          prob *= 1.0 - reset[k];
          next[k] = std::min(phi[k] + 1, z);
        }
      }
      if (prob > 0.0) triplets.emplace_back(space.encode(next), from, prob);
    }
  }
  SparseMatrix P(space.size(), space.size());
  P.setFromTriplets(triplets.begin(), triplets.end());
  P.makeCompressed();
  return P;
}

Eigen::VectorXd steady_state(const SparseMatrix& transitions, const SolverOptions& options,
                             const StateSpace* space) {
  const std::int64_t size = transitions.rows();
  if (size == 0 || transitions.cols() != size) {
    throw std::invalid_argument("transition matrix must be square and non-empty");
  }
  Eigen::VectorXd pi;
  if (size <= options.dense_limit) {
    Eigen::MatrixXd A = Eigen::MatrixXd(transitions) - Eigen::MatrixXd::Identity(size, size);
    A.row(size - 1).setOnes();
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(size);
    rhs(size - 1) = 1.0;
    Eigen::PartialPivLU<Eigen::MatrixXd> lu(A);
    if (!(lu.rcond() > 1e-13)) {
      throw ReducibleChainError("steady state is not unique (singular balance system);" +
                                reducibility_hint(transitions, space));
    }
    pi = lu.solve(rhs);
  } else {
    // Lazy power iteration: same fixed point, aperiodic by construction.
    pi = Eigen::VectorXd::Constant(size, 1.0 / static_cast<double>(size));
    std::int64_t it = 0;
    for (; it < options.max_iterations; ++it) {
      Eigen::VectorXd next = 0.5 * (pi + transitions * pi);
      next /= next.sum();
      const double delta = (next - pi).lpNorm<Eigen::Infinity>();
      pi.swap(next);
      if (delta <= options.tolerance) break;
    }
    if (it == options.max_iterations) {
      throw ReducibleChainError("power iteration did not converge;" +
                                reducibility_hint(transitions, space));
    }
  }
  for (Eigen::Index i = 0; i < pi.size(); ++i) {
    if (pi(i) < 0.0) {
      if (pi(i) < -1e-10) {
        throw ReducibleChainError("steady state has negative mass;" + reducibility_hint(transitions, space));
      }
      pi(i) = 0.0;
    }
  }
  pi /= pi.sum();
  return pi;
}

Eigen::VectorXd hitting_times(const SparseMatrix& transitions, const StateSpace& space, int k,
                              const SolverOptions& options) {
  if (k < 0 || k >= space.num_cps()) throw DimensionError("CP index out of range");
  const std::int64_t size = space.size();
  if (transitions.rows() != size || transitions.cols() != size) {
    throw DimensionError("transition matrix does not match the state space");
  }

  std::vector<char> down(size, 0);
  std::vector<std::int64_t> ages(space.num_cps());
  for (std::int64_t s = 0; s < size; ++s) {
    space.decode(s, ages);
    down[s] = ages[k] == 1;
  }

  // Continuation graph: edges into the down-set terminate the walk.
  const Successors succ = successors_of(transitions);
  std::vector<std::vector<std::int64_t>> preds(size);
  std::vector<char> can_exit(size, 0);
  std::queue<std::int64_t> queue;
  for (std::int64_t s = 0; s < size; ++s) {
    for (const auto& [to, p] : succ.out[s]) {
      if (down[to]) {
        if (!can_exit[s]) {
          can_exit[s] = 1;
          queue.push(s);
        }
      } else {
        preds[to].push_back(s);
      }
    }
  }
  while (!queue.empty()) {
    const std::int64_t s = queue.front();
    queue.pop();
    for (std::int64_t p : preds[s]) {
      if (!can_exit[p]) {
        can_exit[p] = 1;
        queue.push(p);
      }
    }
  }
  // Anything that can wander into a trap never resets with probability one.
  std::vector<char> infinite(size, 0);
  for (std::int64_t s = 0; s < size; ++s) {
    if (!can_exit[s]) {
      infinite[s] = 1;
      queue.push(s);
    }
  }
  while (!queue.empty()) {
    const std::int64_t s = queue.front();
    queue.pop();
    for (std::int64_t p : preds[s]) {
      if (!infinite[p]) {
        infinite[p] = 1;
        queue.push(p);
      }
    }
  }

  std::vector<std::int64_t> local(size, -1);
  std::vector<std::int64_t> finite_states;
  for (std::int64_t s = 0; s < size; ++s) {
    if (!infinite[s]) {
      local[s] = static_cast<std::int64_t>(finite_states.size());
      finite_states.push_back(s);
    }
  }

  Eigen::VectorXd F = Eigen::VectorXd::Constant(size, kInf);
  const auto count = static_cast<Eigen::Index>(finite_states.size());
  if (count == 0) return F;

  Eigen::VectorXd solution;
  if (count <= options.dense_limit) {
    Eigen::MatrixXd A = Eigen::MatrixXd::Identity(count, count);
    for (Eigen::Index i = 0; i < count; ++i) {
      for (const auto& [to, p] : succ.out[finite_states[i]]) {
        if (!down[to]) A(i, local[to]) -= p;
      }
    }
    Eigen::PartialPivLU<Eigen::MatrixXd> lu(A);
    if (!(lu.rcond() > 1e-13)) {
      throw UnreachableResetError("first-passage system for CP " + std::to_string(k + 1) + " is singular");
    }
    solution = lu.solve(Eigen::VectorXd::Ones(count));
  } else {
    solution = Eigen::VectorXd::Ones(count);
    std::int64_t it = 0;
    for (; it < options.max_iterations; ++it) {
      double delta = 0.0;
      // Gauss-Seidel sweep of F = 1 + Q F.
      for (Eigen::Index i = 0; i < count; ++i) {
        double v = 1.0;
        for (const auto& [to, p] : succ.out[finite_states[i]]) {
          if (!down[to]) v += p * solution(local[to]);
        }
        delta = std::max(delta, std::abs(v - solution(i)) / std::max(1.0, std::abs(v)));
        solution(i) = v;
      }
      if (delta <= options.tolerance) break;
    }
    if (it == options.max_iterations) {
      throw UnreachableResetError("first-passage iteration for CP " + std::to_string(k + 1) +
                                  " did not converge");
    }
  }
  for (Eigen::Index i = 0; i < count; ++i) F(finite_states[i]) = solution(i);
  return F;
}

Eigen::VectorXd first_passage(const SparseMatrix& transitions, const StateSpace& space, int k,
                              const SolverOptions& options) {
  Eigen::VectorXd F = hitting_times(transitions, space, k, options);
  for (Eigen::Index s = 0; s < F.size(); ++s) {
    if (std::isinf(F(s))) {
      std::ostringstream os;
      os << "CP " << k + 1 << " is never reset from state (";
      const auto ages = space.decode(s);
      for (std::size_t i = 0; i < ages.size(); ++i) os << (i ? "," : "") << ages[i];
      os << "): its reset probability is zero on every reachable path";
      throw UnreachableResetError(os.str());
    }
  }
  return F;
}

MarkovModel build_markov_model(const NsrPolicy& policy, int n, const NetworkConfig& config,
                               const SolverOptions& options) {
  StateSpace space(config.num_cps, policy.threshold());
  SparseMatrix P = transition_matrix(policy, n, config, space);
  Eigen::VectorXd pi = steady_state(P, options, &space);
  MarkovModel model{space, std::move(P), std::move(pi), {}, {}, 0.0};
  model.residual = residual_inf(model.transitions, model.pi);
  for (int k = 0; k < config.num_cps; ++k) {
    Eigen::VectorXd F = hitting_times(model.transitions, space, k, options);
    double mean = 0.0;
    for (Eigen::Index s = 0; s < F.size(); ++s) {
      if (std::isinf(F(s))) {
        if (model.pi(s) > kNegligibleMass) {
          mean = kInf;
          break;
        }
        continue;
      }
      mean += F(s) * model.pi(s);
    }
    model.first_passage.push_back(std::move(F));
    model.mean_age.push_back(mean);
  }
  return model;
}

double je_closed_form_nsr(const NsrPolicy& policy, const NetworkConfig& config,
                          const SolverOptions& options) {
  config.validate();
  double sum = 0.0;
  for (int n = 0; n < config.num_errhs; ++n) {
    const MarkovModel model = build_markov_model(policy, n, config, options);
    for (double m : model.mean_age) {
      if (std::isinf(m)) return kInfiniteAoi;
      sum += m;
    }
  }
  return sum / (config.num_errhs * config.num_cps);
}

NsrBounds jc_upper_bounds_nsr(const NsrPolicy& policy, const NetworkConfig& config,
                              const SolverOptions& options) {
  config.validate();
  const int K = config.num_cps;
  if (policy.requests().num_cps() != K || policy.requests().num_errhs() != config.num_errhs ||
      static_cast<int>(policy.command_rates().size()) != K) {
    throw DimensionError("policy dimensions do not match the network");
  }
  const double r_min = policy.command_rates().back();
  const RateAggregates agg = aggregate_rates(policy.requests());
  NsrBounds bounds;
  for (int k = 0; k < K; ++k) {
    if (agg.per_cp[k] * r_min <= 0.0) return bounds;
  }

  double fresh = 0.0;
  for (int k = 0; k < K; ++k) fresh += 1.0 / (agg.per_cp[k] * r_min);
  bounds.fresh = fresh / K;

  std::vector<std::vector<double>> mean_age(config.num_errhs);
  for (int n = 0; n < config.num_errhs; ++n) {
    bool used = false;
    for (int k = 0; k < K; ++k) used = used || policy.requests()(k, n) > 0.0;
    if (used) mean_age[n] = build_markov_model(policy, n, config, options).mean_age;
  }
  double replace = 0.0;
  for (int k = 0; k < K; ++k) {
    const double bk = agg.per_cp[k];
    double cached = 0.0;
    for (int n = 0; n < config.num_errhs; ++n) {
      const double bkn = policy.requests()(k, n);
      if (bkn <= 0.0) continue;
      cached += bkn * mean_age[n][k];
    }
    replace += (1.0 - bk + bk * r_min) / (bk * r_min) + (1.0 - r_min) * cached;
  }
  bounds.replace = replace / K;
  return bounds;
}

void write_chain_csv(const MarkovModel& model, const std::filesystem::path& dir,
                     const std::string& prefix) {
  std::filesystem::create_directories(dir);
  auto open = [&](const std::string& name) {
    std::ofstream os(dir / (prefix + "_" + name + ".csv"));
    if (!os) throw std::runtime_error("cannot write " + (dir / (prefix + "_" + name + ".csv")).string());
    os.precision(17);
    return os;
  };
  const int K = model.space.num_cps();
  {
    auto os = open("states");
    os << "index";
    for (int k = 0; k < K; ++k) os << ",phi_" << k + 1;
    os << "\n";
    for (std::int64_t s = 0; s < model.space.size(); ++s) {
      os << s;
      for (auto a : model.space.decode(s)) os << "," << a;
      os << "\n";
    }
  }
  {
    auto os = open("P");
    os << "to,from,probability\n";
    for (std::int64_t from = 0; from < model.transitions.outerSize(); ++from) {
      for (SparseMatrix::InnerIterator it(model.transitions, from); it; ++it) {
        os << it.row() << "," << from << "," << it.value() << "\n";
      }
    }
  }
  {
    auto os = open("pi");
    os << "index,pi\n";
    for (Eigen::Index s = 0; s < model.pi.size(); ++s) os << s << "," << model.pi(s) << "\n";
  }
  {
    auto os = open("F");
    os << "index";
    for (int k = 0; k < K; ++k) os << ",F_" << k + 1;
    os << "\n";
    for (std::int64_t s = 0; s < model.space.size(); ++s) {
      os << s;
      for (int k = 0; k < K; ++k) os << "," << model.first_passage[k](s);
      os << "\n";
    }
  }
}

}  // namespace fran_aoi
