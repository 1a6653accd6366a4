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

#include "fran_aoi/cli/commands.h"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <optional>

#include "CLI11.hpp"
#include "fran_aoi/cli/config_io.h"
#include "fran_aoi/cli/records.h"
#include "fran_aoi/nsr_analysis.h"
#include "fran_aoi/osr_analysis.h"

namespace fran_aoi::cli {
namespace {

struct CommonOptions {
  std::string preset;
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::int64_t> slots;
  std::optional<std::int64_t> warmup;
  std::optional<int> replications;
  std::optional<int> threads;
  std::string out;
  std::string format;
  std::string policy_class;
  std::string tie_rule;
};

void add_common(CLI::App& cmd, CommonOptions& o, const char* config_flag, const char* default_format) {
  o.format = default_format;
  cmd.add_option("--preset", o.preset, "Built-in configuration (" + [] {
    std::string s;
    for (const auto& n : preset_names()) s += (s.empty() ? "" : ", ") + n;
    return s;
  }() + ")");
  cmd.add_option(config_flag, o.config_path, "JSON configuration file");
  cmd.add_option("--seed", o.seed, "Base seed");
  cmd.add_option("--slots", o.slots, "Slots per replication (T)");
  cmd.add_option("--warmup", o.warmup, "Discarded slots (W)");
  cmd.add_option("--replications", o.replications, "Independent replications");
  cmd.add_option("--threads", o.threads, "Worker threads for replications");
  cmd.add_option("--out", o.out, "Write output to this file instead of stdout");
  cmd.add_option("--format", o.format, "Output format")->check(CLI::IsMember({"csv", "json"}));
  cmd.add_option("--policy-class", o.policy_class, "Override the policy class")
      ->check(CLI::IsMember({"osr", "nsr"}));
  cmd.add_option("--tie-rule", o.tie_rule, "Tie handling for age ranking")
      ->check(CLI::IsMember({"appendix-e", "strict-order"}));
}

ExperimentConfig resolve(const CommonOptions& o) {
  if (!o.preset.empty() && !o.config_path.empty()) {
    throw ConfigError("give either --preset or a config file, not both");
  }
  if (o.preset.empty() && o.config_path.empty()) throw ConfigError("a --preset or config file is required");
  ExperimentConfig c = o.preset.empty() ? load_config(o.config_path) : load_preset(o.preset);
  RunParams& p = c.simulation;
  if (o.seed) p.seed = *o.seed;
  if (o.slots) p.slots = *o.slots;
  if (o.warmup) p.warmup = *o.warmup;
  if (o.replications) p.replications = *o.replications;
  if (o.threads) p.threads = *o.threads;
  if (!o.policy_class.empty()) c.policy_class = parse_policy_class(o.policy_class);
  if (!o.tie_rule.empty()) c.tie_rule = parse_tie_rule(o.tie_rule);
  if (c.sweep) {
    c.sweep->simulation = p;
    if (!o.policy_class.empty()) c.sweep->policy_class = c.policy_class;
    if (!o.tie_rule.empty()) c.sweep->tie_rule = c.tie_rule;
  }
  return c;
}

void emit(const CommonOptions& o, const std::string& text, std::ostream& out) {
  if (o.out.empty()) {
    out << text;
    return;
  }
  std::ofstream file(o.out, std::ios::binary | std::ios::trunc);
  if (!file || !(file << text) || !file.flush()) {
    throw std::runtime_error("cannot write '" + o.out + "'");
  }
}

std::string cmd_simulate(const CommonOptions& o) {
  const ExperimentConfig c = resolve(o);
  c.simulation.validate();
  const Policy policy = c.policy();
  const SimStats stats = run(c.network, policy, c.simulation);
  Record r;
  echo_inputs(r, c.network, policy, c.simulation);
  add_sim_stats(r, stats);
  return render(r, parse_format(o.format));
}

std::string cmd_analyze(const CommonOptions& o, const std::string& dump_dir) {
  const ExperimentConfig c = resolve(o);
  const Policy policy = c.policy();
  require_feasible(policy, c.network);
  Record r;
  echo_inputs(r, c.network, policy, c.simulation);
  if (const auto* osr = std::get_if<OsrPolicy>(&policy)) {
    r.set("je_theory", je_closed_form(*osr, c.network));
    r.set("jc_bound_fresh", jc_upper_bound_fresh(*osr, c.network));
    r.set("jc_bound_replace", jc_upper_bound_replace(*osr, c.network));
    return render(r, parse_format(o.format));
  }
  const NsrPolicy& nsr = std::get<NsrPolicy>(policy);
  double je = 0.0;
  double residual = 0.0;
  std::int64_t states = 0;
  for (int n = 0; n < c.network.num_errhs; ++n) {
    const MarkovModel model = build_markov_model(nsr, n, c.network);
    for (double m : model.mean_age) je += m;
    residual = std::max(residual, model.residual);
    states = model.space.size();
    if (!dump_dir.empty()) {
      std::filesystem::create_directories(dump_dir);
      write_chain_csv(model, dump_dir, "errh" + std::to_string(n + 1));
    }
  }
  je /= static_cast<double>(c.network.num_errhs) * c.network.num_cps;
  const NsrBounds bounds = jc_upper_bounds_nsr(nsr, c.network);
  r.set("je_theory", je);
  r.set("jc_bound_fresh", bounds.fresh);
  r.set("jc_bound_replace", bounds.replace);
  r.set("chain_states", states);
  r.set("pi_residual", residual);
  return render(r, parse_format(o.format));
}

std::string cmd_sweep(const CommonOptions& o, std::ostream& err, bool& total_failure) {
  const ExperimentConfig c = resolve(o);
  if (!c.sweep) throw ConfigError("configuration has no sweep section");
  const SweepSpec& spec = *c.sweep;
  const SweepResult result = sweep(spec, c.network);
  const auto rows = sweep_records(spec, result);
  total_failure = !result.rows.empty() && std::none_of(result.rows.begin(), result.rows.end(),
                                                        [](const SweepRow& row) { return row.status == "ok"; });
  if (result.argmin) {
    err << "argmin " << spec.argmin_metric << " at row " << *result.argmin + 1 << "\n";
  }
  return render_table(sweep_header(spec, c.network), rows, parse_format(o.format));
}

struct OptimalArgs {
  double b = 0.0;
  double r = 0.0;
  std::optional<double> threshold;
  int designated = 1;
  std::string policy_out;
};

std::string cmd_optimal(const CommonOptions& o, const OptimalArgs& a) {
  ExperimentConfig c = resolve(o);
  c.simulation.validate();
  OptimalOptions opts;
  opts.threshold = a.threshold;
  opts.designated_errh = a.designated - 1;
  opts.nsr_threshold_age = c.threshold;
  opts.tie_rule = c.tie_rule;
  const OptimalChoice choice = c.policy_class == PolicyClass::kOsr
                                   ? optimal_osr_choice(c.network, a.b, a.r, opts)
                                   : optimal_nsr_choice(c.network, a.b, a.r, opts);
  require_feasible(choice.policy, c.network);
  const SimStats stats = run(c.network, choice.policy, c.simulation);

  Record r;
  echo_inputs(r, c.network, choice.policy, c.simulation);
  r.set("b_total", a.b);
  r.set("r_total", a.r);
  r.set("layout", std::string(to_string(choice.layout)));
  r.set("layout_threshold", choice.threshold);
  r.set("heuristic_threshold", std::int64_t{choice.heuristic_threshold});
  r.set("crossover_found", std::int64_t{choice.crossover_found});
  r.set("near_threshold", std::int64_t{choice.near_threshold});
  add_sim_stats(r, stats);
  if (choice.alternative) {
    const SimStats alt = run(c.network, *choice.alternative, c.simulation);
    r.set("alternative_jc_hat", alt.jc_hat);
    r.set("alternative_stderr_jc", alt.stderr_jc);
  }

  if (!a.policy_out.empty()) {
    ExperimentConfig policy_file = c;
    policy_file.sweep.reset();
    set_policy(policy_file, choice.policy);
    std::ofstream file(a.policy_out, std::ios::binary | std::ios::trunc);
    if (!file || !(file << to_config_json(policy_file)) || !file.flush()) {
      throw std::runtime_error("cannot write '" + a.policy_out + "'");
    }
  }
  return render(r, parse_format(o.format));
}

void report_error(std::ostream& err, const std::exception& e) {
  if (const auto* inf = dynamic_cast<const InfeasiblePolicyError*>(&e)) {
    err << "error: infeasible policy\n";
    for (const auto& v : inf->violations()) err << "  " << v.constraint << ": " << v.detail << "\n";
    return;
  }
  err << "error: " << e.what() << "\n";
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Age-of-information experiments for fog radio access networks", "fran_aoi"};
  app.require_subcommand(1);

  CommonOptions sim_opts, analyze_opts, sweep_opts, optimal_opts;
  std::string dump_dir;
  OptimalArgs optimal_args;

  auto* sim = app.add_subcommand("simulate", "Monte-Carlo estimate of J_e and J_c");
  add_common(*sim, sim_opts, "--config,-c", "json");
  auto* analyze = app.add_subcommand("analyze", "Closed-form J_e and J_c upper bounds");
  add_common(*analyze, analyze_opts, "--config,-c", "json");
  analyze->add_option("--dump-chain", dump_dir, "Write NSR chain CSVs (states, P, pi, F) into this directory");
  auto* sw = app.add_subcommand("sweep", "Evaluate a parameter grid into a table");
  add_common(*sw, sweep_opts, "--spec,--config,-c", "csv");
  auto* opt = app.add_subcommand("optimal", "Build and evaluate the optimal policy for totals (b, r)");
  add_common(*opt, optimal_opts, "--config,-c", "json");
  opt->add_option("--b", optimal_args.b, "Total request rate per CU")->required();
  opt->add_option("--r", optimal_args.r, "Total command rate per eRRH")->required();
  opt->add_option("--threshold", optimal_args.threshold, "Request-consolidation threshold on b/K");
  opt->add_option("--designated", optimal_args.designated, "eRRH (1-based) that receives consolidated requests")
      ->check(CLI::PositiveNumber);
  opt->add_option("--policy-out", optimal_args.policy_out, "Write the optimal policy as a config file");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  }

  try {
    if (sim->parsed()) {
      emit(sim_opts, cmd_simulate(sim_opts), out);
    } else if (analyze->parsed()) {
      emit(analyze_opts, cmd_analyze(analyze_opts, dump_dir), out);
    } else if (sw->parsed()) {
      bool total_failure = false;
      const std::string text = cmd_sweep(sweep_opts, err, total_failure);
      emit(sweep_opts, text, out);
      if (total_failure) {
        err << "error: every grid point failed; see the status column\n";
        return kExitRuntime;
      }
    } else if (opt->parsed()) {
      emit(optimal_opts, cmd_optimal(optimal_opts, optimal_args), out);
    }
  } catch (const ConfigError& e) {
    report_error(err, e);
    return kExitUsage;
  } catch (const std::invalid_argument& e) {
    report_error(err, e);
    return kExitUsage;
  } catch (const std::exception& e) {
    report_error(err, e);
    return kExitRuntime;
  }
  return kExitOk;
}

}  // namespace fran_aoi::cli
