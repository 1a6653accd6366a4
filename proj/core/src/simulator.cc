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

#include "fran_aoi/simulator.h"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <thread>

namespace fran_aoi {
namespace {

Table<double> cumulative_requests(const RequestRates& b) {
  Table<double> cum(b.num_cps(), b.num_errhs());
  for (int k = 0; k < b.num_cps(); ++k) {
    double acc = 0.0;
    for (int n = 0; n < b.num_errhs(); ++n) {
      acc += b(k, n);
      cum(k, n) = acc;
    }
  }
  return cum;
}

int draw_target(std::span<const double> cum, double u) {
  for (std::size_t n = 0; n < cum.size(); ++n) {
    if (u < cum[n]) return static_cast<int>(n);
  }
  return kNoRequest;
}

void check_dimensions(const NetworkConfig& config, const Policy& policy) {
  const RequestRates& b = requests_of(policy);
  if (b.num_cps() != config.num_cps || b.num_errhs() != config.num_errhs ||
      static_cast<int>(command_rates_of(policy).size()) != config.num_cps) {
    throw DimensionError("policy dimensions do not match the network");
  }
}

struct ReplicationSums {
  Table<double> g;
  Table<double> h;
};

ReplicationSums run_replication(const NetworkConfig& config, const Policy& policy,
                                const RunParams& params, int index) {
  ProtocolStepper stepper(config, policy);
  Rng rng(stream_seed(params.seed, static_cast<std::uint64_t>(index)));
  Table<std::int64_t> sum_g(config.num_errhs, config.num_cps, 0);
  Table<std::int64_t> sum_h(config.num_cus, config.num_cps, 0);
  for (std::int64_t t = 0; t < params.slots; ++t) {
    stepper.advance(rng);
    if (t + 1 > params.warmup) {
      const auto g = stepper.state().g.values();
      const auto h = stepper.state().h.values();
      auto sg = sum_g.values();
      auto sh = sum_h.values();
      for (std::size_t i = 0; i < g.size(); ++i) sg[i] += g[i];
      for (std::size_t i = 0; i < h.size(); ++i) sh[i] += h[i];
    }
  }
  const double used = static_cast<double>(params.slots - params.warmup);
  ReplicationSums out{Table<double>(config.num_errhs, config.num_cps),
                      Table<double>(config.num_cus, config.num_cps)};
  for (std::size_t i = 0; i < out.g.values().size(); ++i) {
    out.g.values()[i] = static_cast<double>(sum_g.values()[i]) / used;
  }
  for (std::size_t i = 0; i < out.h.values().size(); ++i) {
    out.h.values()[i] = static_cast<double>(sum_h.values()[i]) / used;
  }
  return out;
}

double mean_of(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

double standard_error(std::span<const double> v) {
  if (v.size() < 2) return 0.0;
  const double m = mean_of(v);
  double ss = 0.0;
  for (double x : v) ss += (x - m) * (x - m);
  return std::sqrt(ss / static_cast<double>(v.size() - 1)) / std::sqrt(static_cast<double>(v.size()));
}

}  // namespace

AgeState AgeState::initial(const NetworkConfig& config) {
  return {Table<std::int64_t>(config.num_errhs, config.num_cps, 1),
          Table<std::int64_t>(config.num_cus, config.num_cps, 1)};
}

Table<int> sample_requests(const RequestRates& requests, int num_cus, Rng& rng) {
  const Table<double> cum = cumulative_requests(requests);
  Table<int> beta(num_cus, requests.num_cps(), kNoRequest);
  for (int m = 0; m < num_cus; ++m) {
    for (int k = 0; k < requests.num_cps(); ++k) {
      beta(m, k) = draw_target(cum.row(k), rng.uniform());
    }
  }
  return beta;
}

std::vector<double> nsr_command_rates(std::span<const std::int64_t> g_row, const NsrPolicy& policy) {
  std::vector<double> out(g_row.size());
  assign_ranked_rates(g_row, policy.command_rates(), policy.threshold(), policy.tie_rule(), out);
  return out;
}

ProtocolStepper::ProtocolStepper(const NetworkConfig& config, const Policy& policy)
    : config_(config), nsr_(is_nsr(policy)) {
  config_.validate();
  check_dimensions(config_, policy);
  const auto r = command_rates_of(policy);
  command_rates_.assign(r.begin(), r.end());
  if (const auto* p = std::get_if<NsrPolicy>(&policy)) {
    threshold_ = p->threshold();
    tie_rule_ = p->tie_rule();
  }
  cumulative_ = cumulative_requests(requests_of(policy));
  decisions_.beta = Table<int>(config_.num_cus, config_.num_cps, kNoRequest);
  decisions_.gamma = Table<std::uint8_t>(config_.num_errhs, config_.num_cps, 0);
  targeted_ = Table<std::uint8_t>(config_.num_errhs, config_.num_cps, 0);
  row_rates_.assign(config_.num_cps, 0.0);
  reset();
}

void ProtocolStepper::reset() { state_ = AgeState::initial(config_); }

void ProtocolStepper::set_state(const AgeState& state) {
  if (state.g.rows() != config_.num_errhs || state.g.cols() != config_.num_cps ||
      state.h.rows() != config_.num_cus || state.h.cols() != config_.num_cps) {
    throw DimensionError("age state does not match the network");
  }
  state_ = state;
}

void ProtocolStepper::advance(Rng& rng) {
  const int M = config_.num_cus;
  const int N = config_.num_errhs;
  const int K = config_.num_cps;
  Table<int>& beta = decisions_.beta;
  Table<std::uint8_t>& gamma = decisions_.gamma;

  targeted_.fill(0);
  for (int m = 0; m < M; ++m) {
    for (int k = 0; k < K; ++k) {
      const int n = draw_target(cumulative_.row(k), rng.uniform());
      beta(m, k) = n;
      if (n != kNoRequest) targeted_(n, k) = 1;
    }
  }

  for (int n = 0; n < N; ++n) {
    bool rates_ready = false;
    for (int k = 0; k < K; ++k) {
      gamma(n, k) = 0;
      if (!targeted_(n, k)) continue;
      double rate = command_rates_[k];
      if (nsr_) {
        if (!rates_ready) {
          assign_ranked_rates(state_.g.row(n), command_rates_, threshold_, tie_rule_, row_rates_);
          rates_ready = true;
        }
        rate = row_rates_[k];
      }
      gamma(n, k) = rng.uniform() < rate ? 1 : 0;
    }
  }

  // CU ages first: they read the pre-slot eRRH ages.
  for (int m = 0; m < M; ++m) {
    for (int k = 0; k < K; ++k) {
      std::int64_t& h = state_.h(m, k);
      const int n = beta(m, k);
      if (n == kNoRequest) {
        ++h;
      } else if (gamma(n, k)) {
        h = 1;
      } else {
        h = std::min(h, state_.g(n, k)) + 1;
      }
    }
  }
  for (int n = 0; n < N; ++n) {
    for (int k = 0; k < K; ++k) {
      std::int64_t& g = state_.g(n, k);
      g = gamma(n, k) ? 1 : g + 1;
    }
  }
}

AgeState step(const AgeState& state, const Policy& policy, const NetworkConfig& config, Rng& rng) {
  ProtocolStepper stepper(config, policy);
  stepper.set_state(state);
  stepper.advance(rng);
  return stepper.state();
}

void RunParams::validate() const {
  if (warmup < 0) throw std::invalid_argument("warmup W must be >= 0");
  if (slots <= warmup) throw std::invalid_argument("T > W required (slots must exceed warmup)");
  if (replications < 1) throw std::invalid_argument("replications must be >= 1");
  if (threads < 1) throw std::invalid_argument("threads must be >= 1");
}

SimStats run(const NetworkConfig& config, const Policy& policy, const RunParams& params) {
  params.validate();
  require_feasible(policy, config);

  std::vector<ReplicationSums> reps(params.replications);
  const int workers = std::min(params.threads, params.replications);
  if (workers <= 1) {
    for (int i = 0; i < params.replications; ++i) reps[i] = run_replication(config, policy, params, i);
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (int w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] {
        for (int i = w; i < params.replications; i += workers) {
          reps[i] = run_replication(config, policy, params, i);
        }
      });
    }
  }

  SimStats stats;
  stats.per_pair_g = Table<double>(config.num_errhs, config.num_cps, 0.0);
  stats.per_pair_h = Table<double>(config.num_cus, config.num_cps, 0.0);
  std::vector<double> je(params.replications);
  std::vector<double> jc(params.replications);
  for (int i = 0; i < params.replications; ++i) {
    je[i] = mean_of(reps[i].g.values());
    jc[i] = mean_of(reps[i].h.values());
    for (std::size_t j = 0; j < reps[i].g.values().size(); ++j) {
      stats.per_pair_g.values()[j] += reps[i].g.values()[j];
    }
    for (std::size_t j = 0; j < reps[i].h.values().size(); ++j) {
      stats.per_pair_h.values()[j] += reps[i].h.values()[j];
    }
  }
  for (double& v : stats.per_pair_g.values()) v /= params.replications;
  for (double& v : stats.per_pair_h.values()) v /= params.replications;

  stats.je_hat = mean_of(je);
  stats.jc_hat = mean_of(jc);
  stats.stderr_je = standard_error(je);
  stats.stderr_jc = standard_error(jc);
  stats.slots_used = params.slots - params.warmup;
  stats.warmup = params.warmup;
  stats.replications = params.replications;
  stats.seed = params.seed;
  return stats;
}

}  // namespace fran_aoi
