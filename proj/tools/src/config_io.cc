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

#include "fran_aoi/cli/config_io.h"

#include <algorithm>
#include <fstream>
#include <regex>
#include <set>
#include <sstream>

#include "json.hpp"
#include "presets_data.h"

namespace fran_aoi::cli {
namespace {

using json = nlohmann::json;
using ordered_json = nlohmann::ordered_json;

class Parser {
 public:
  Parser(std::string_view text, std::string source) : text_(text), source_(std::move(source)) {}

  ExperimentConfig parse() {
    json root;
    try {
      root = json::parse(text_);
    } catch (const json::parse_error& e) {
      throw ConfigError(source_ + ":" + std::to_string(line_at(e.byte == 0 ? 0 : e.byte - 1)) +
                        ": invalid JSON (" + e.what() + ")");
    }
    if (!root.is_object()) throw ConfigError(source_ + ":1: top level must be an object");

    ExperimentConfig config;
    const bool nested = root.contains("network") || root.contains("policy") ||
                        root.contains("simulation") || root.contains("sweep");
    if (nested) {
      check_keys(root, {"network", "policy", "simulation", "sweep"}, "");
      if (root.contains("network")) parse_network(section(root, "network"), config);
      if (root.contains("simulation")) parse_simulation(section(root, "simulation"), config);
      if (root.contains("policy")) parse_policy(section(root, "policy"), config);
      validate_network(config, "network");
      check_policy_shape(config);
      if (root.contains("sweep")) parse_sweep(section(root, "sweep"), config);
    } else {
      parse_flat(root, config);
    }
    return config;
  }

 private:
  int line_at(std::size_t offset) const {
    offset = std::min(offset, text_.size());
    return 1 + static_cast<int>(std::count(text_.begin(), text_.begin() + offset, '\n'));
  }

  std::string where(std::string_view key) const {
    const std::string quoted = "\"" + std::string(key) + "\"";
    const auto pos = text_.find(quoted);
    if (pos == std::string_view::npos) return source_;
    return source_ + ":" + std::to_string(line_at(pos));
  }

  [[noreturn]] void fail(std::string_view key, const std::string& message) const {
    throw ConfigError(where(key) + ": " + std::string(key) + ": " + message);
  }

  const json& section(const json& root, const char* key) const {
    const json& s = root.at(key);
    if (!s.is_object()) fail(key, "expected an object");
    return s;
  }

  void check_keys(const json& obj, std::set<std::string> allowed, std::string_view where_name) const {
    for (const auto& [key, _] : obj.items()) {
      if (!allowed.count(key)) {
        fail(key, "unknown key" + (where_name.empty() ? std::string() : " in " + std::string(where_name)));
      }
    }
  }

  double number(const json& v, std::string_view key) const {
    if (!v.is_number()) fail(key, "expected a number");
    return v.get<double>();
  }

  std::int64_t integer(const json& v, std::string_view key) const {
    if (v.is_number_integer()) return v.get<std::int64_t>();
    if (v.is_number_float()) {
      const double d = v.get<double>();
      if (d == static_cast<double>(static_cast<std::int64_t>(d))) return static_cast<std::int64_t>(d);
    }
    fail(key, "expected an integer");
  }

  std::uint64_t unsigned_integer(const json& v, std::string_view key) const {
    if (v.is_number_unsigned()) return v.get<std::uint64_t>();
    if (v.is_number_integer() && v.get<std::int64_t>() >= 0) return v.get<std::uint64_t>();
    fail(key, "expected a non-negative integer");
  }

  bool boolean(const json& v, std::string_view key) const {
    if (!v.is_boolean()) fail(key, "expected true or false");
    return v.get<bool>();
  }

  std::string string(const json& v, std::string_view key) const {
    if (!v.is_string()) fail(key, "expected a string");
    return v.get<std::string>();
  }

  std::vector<double> numbers(const json& v, std::string_view key) const {
    if (!v.is_array()) fail(key, "expected an array of numbers");
    std::vector<double> out;
    for (const auto& x : v) out.push_back(number(x, key));
    return out;
  }

  template <typename F>
  auto guarded(std::string_view key, F&& f) const {
    try {
      return f();
    } catch (const ConfigError&) {
      throw;
    } catch (const std::exception& e) {
      fail(key, e.what());
    }
  }

  void parse_network(const json& s, ExperimentConfig& config) const {
    check_keys(s, {"num_cus", "num_errhs", "num_cps", "request_budget", "command_budget"}, "network");
    NetworkConfig& n = config.network;
    if (s.contains("num_cus")) n.num_cus = static_cast<int>(integer(s["num_cus"], "num_cus"));
    if (s.contains("num_errhs")) n.num_errhs = static_cast<int>(integer(s["num_errhs"], "num_errhs"));
    if (s.contains("num_cps")) n.num_cps = static_cast<int>(integer(s["num_cps"], "num_cps"));
    if (s.contains("request_budget")) n.request_budget = number(s["request_budget"], "request_budget");
    if (s.contains("command_budget")) n.command_budget = number(s["command_budget"], "command_budget");
  }

  void validate_network(const ExperimentConfig& config, std::string_view key) const {
    guarded(key, [&] {
      config.network.validate();
      return 0;
    });
  }

  void parse_class_fields(const json& s, ExperimentConfig& config) const {
    if (s.contains("class")) {
      const std::string c = string(s["class"], "class");
      config.policy_class = guarded("class", [&] { return parse_policy_class(c); });
    }
    if (s.contains("threshold")) config.threshold = static_cast<int>(integer(s["threshold"], "threshold"));
    if (s.contains("tie_rule")) {
      const std::string t = string(s["tie_rule"], "tie_rule");
      config.tie_rule = guarded("tie_rule", [&] { return parse_tie_rule(t); });
    }
  }

  void parse_policy(const json& s, ExperimentConfig& config) const {
    check_keys(s, {"class", "requests", "command_rates", "threshold", "tie_rule"}, "policy");
    parse_class_fields(s, config);
    if (!s.contains("requests")) fail("policy", "missing 'requests'");
    if (!s.contains("command_rates")) fail("policy", "missing 'command_rates'");
    const json& req = s["requests"];
    if (!req.is_array()) fail("requests", "expected an array of per-CP rows");
    std::vector<std::vector<double>> rows;
    for (const auto& row : req) rows.push_back(numbers(row, "requests"));
    config.requests = guarded("requests", [&] { return RequestRates::from_rows(rows); });
    config.command_rates = numbers(s["command_rates"], "command_rates");
    config.has_policy = true;
  }

  void check_policy_shape(const ExperimentConfig& config) const {
    if (!config.has_policy) return;
    const NetworkConfig& n = config.network;
    if (config.requests.num_cps() != n.num_cps || config.requests.num_errhs() != n.num_errhs) {
      fail("requests", "expected " + std::to_string(n.num_cps) + " rows of " +
                           std::to_string(n.num_errhs) + " rates (K x N)");
    }
    if (static_cast<int>(config.command_rates.size()) != n.num_cps) {
      fail("command_rates", "expected " + std::to_string(n.num_cps) + " entries");
    }
    if (config.threshold < 1) fail("threshold", "must be >= 1");
  }

  void parse_simulation(const json& s, ExperimentConfig& config) const {
    check_keys(s, {"slots", "warmup", "replications", "seed", "threads"}, "simulation");
    RunParams& p = config.simulation;
    if (s.contains("slots")) p.slots = integer(s["slots"], "slots");
    if (s.contains("warmup")) p.warmup = integer(s["warmup"], "warmup");
    if (s.contains("replications")) p.replications = static_cast<int>(integer(s["replications"], "replications"));
    if (s.contains("seed")) p.seed = unsigned_integer(s["seed"], "seed");
    if (s.contains("threads")) p.threads = static_cast<int>(integer(s["threads"], "threads"));
  }

  void parse_sweep(const json& s, ExperimentConfig& config) const {
    check_keys(s,
               {"class", "threshold", "tie_rule", "cp_rates", "command_rates", "split_resolution",
                "optimal_policies", "common_random_numbers", "argmin_metric", "modes", "axes"},
               "sweep");
    SweepSpec spec;
    ExperimentConfig local = config;
    parse_class_fields(s, local);
    spec.policy_class = local.policy_class;
    spec.threshold = local.threshold;
    spec.tie_rule = local.tie_rule;
    const int K = config.network.num_cps;
    if (config.has_policy) {
      spec.cp_rates = aggregate_rates(config.requests).per_cp;
      spec.command_rates = config.command_rates;
    } else if (K != 2) {
      spec.cp_rates.assign(K, 0.8);
      spec.command_rates.assign(K, 0.6 / K);
    }
    if (s.contains("cp_rates")) spec.cp_rates = numbers(s["cp_rates"], "cp_rates");
    if (s.contains("command_rates")) spec.command_rates = numbers(s["command_rates"], "command_rates");
    if (static_cast<int>(spec.cp_rates.size()) != K) fail("cp_rates", "expected K entries");
    if (static_cast<int>(spec.command_rates.size()) != K) fail("command_rates", "expected K entries");
    if (s.contains("split_resolution")) {
      spec.split_resolution = static_cast<int>(integer(s["split_resolution"], "split_resolution"));
      if (spec.split_resolution < 1) fail("split_resolution", "must be >= 1");
    }
    if (s.contains("optimal_policies")) spec.optimal_policies = boolean(s["optimal_policies"], "optimal_policies");
    if (s.contains("common_random_numbers")) {
      spec.common_random_numbers = boolean(s["common_random_numbers"], "common_random_numbers");
    }
    if (s.contains("argmin_metric")) {
      spec.argmin_metric = string(s["argmin_metric"], "argmin_metric");
      guarded("argmin_metric", [&] { return SweepRow{}.metric(spec.argmin_metric); });
    }
    if (s.contains("modes")) {
      const json& m = s["modes"];
      if (!m.is_object()) fail("modes", "expected an object");
      check_keys(m, {"simulate", "analytic", "bounds"}, "modes");
      if (m.contains("simulate")) spec.modes.simulate = boolean(m["simulate"], "simulate");
      if (m.contains("analytic")) spec.modes.analytic = boolean(m["analytic"], "analytic");
      if (m.contains("bounds")) spec.modes.bounds = boolean(m["bounds"], "bounds");
    }
    if (s.contains("axes")) {
      const json& axes = s["axes"];
      if (!axes.is_array()) fail("axes", "expected an array");
      for (const auto& a : axes) {
        if (!a.is_object()) fail("axes", "each axis must be an object");
        check_keys(a, {"name", "values", "linspace"}, "axis");
        if (!a.contains("name")) fail("axes", "axis without 'name'");
        SweepAxis axis{string(a["name"], "name"), {}};
        static const std::set<std::string> kAxes = {"split", "split_fraction", "split_index", "b_k", "b1",
                                                    "r1",    "b_total",        "r_total",     "z",   "class"};
        if (!kAxes.count(axis.name)) fail("name", "unknown sweep axis '" + axis.name + "'");
        if (a.contains("values") == a.contains("linspace")) {
          fail("axes", "axis '" + axis.name + "' needs exactly one of 'values' or 'linspace'");
        }
        if (a.contains("values")) {
          axis.values = numbers(a["values"], "values");
        } else {
          const auto l = numbers(a["linspace"], "linspace");
          if (l.size() != 3 || l[2] < 0 || l[2] != static_cast<int>(l[2])) {
            fail("linspace", "expected [start, stop, count]");
          }
          axis.values = linspace(l[0], l[1], static_cast<int>(l[2]));
        }
        spec.axes.push_back(std::move(axis));
      }
    }
    config.sweep = std::move(spec);
  }

  // Reads back the records written by echo_inputs; output fields are ignored.
  void parse_flat(const json& root, ExperimentConfig& config) const {
    parse_network(filter(root, {"num_cus", "num_errhs", "num_cps", "request_budget", "command_budget"}), config);
    parse_simulation(filter(root, {"slots", "warmup", "replications", "seed", "threads"}), config);
    parse_class_fields(root, config);
    validate_network(config, "num_cps");

    const std::regex b_key(R"(b_(\d+)_(\d+))");
    const std::regex r_key(R"(r_(\d+))");
    const int K = config.network.num_cps;
    const int N = config.network.num_errhs;
    std::vector<std::vector<double>> rows(K, std::vector<double>(N, 0.0));
    std::vector<double> rates(K, 0.0);
    int b_seen = 0;
    int r_seen = 0;
    for (const auto& [key, value] : root.items()) {
      std::smatch m;
      if (std::regex_match(key, m, b_key)) {
        const int k = std::stoi(m[1]);
        const int n = std::stoi(m[2]);
        if (k < 1 || k > K || n < 1 || n > N) fail(key, "index outside K x N");
        rows[k - 1][n - 1] = number(value, key);
        ++b_seen;
      } else if (std::regex_match(key, m, r_key)) {
        const int k = std::stoi(m[1]);
        if (k < 1 || k > K) fail(key, "index outside K");
        rates[k - 1] = number(value, key);
        ++r_seen;
      }
    }
    if (b_seen == 0 && r_seen == 0) return;
    if (b_seen != K * N) fail("b_1_1", "expected all K x N request rates b_<k>_<n>");
    if (r_seen != K) fail("r_1", "expected all K command rates r_<k>");
    config.requests = RequestRates::from_rows(rows);
    config.command_rates = rates;
    config.has_policy = true;
    check_policy_shape(config);
  }

  static json filter(const json& root, std::initializer_list<const char*> keys) {
    json out = json::object();
    for (const char* k : keys) {
      if (root.contains(k)) out[k] = root[k];
    }
    return out;
  }

  std::string_view text_;
  std::string source_;
};

}  // namespace

Policy ExperimentConfig::policy() const {
  if (!has_policy) throw ConfigError("configuration has no policy");
  if (policy_class == PolicyClass::kOsr) return OsrPolicy{requests, command_rates};
  return NsrPolicy(requests, command_rates, threshold, tie_rule);
}

ExperimentConfig parse_config(std::string_view text, const std::string& source) {
  return Parser(text, source).parse();
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open config file '" + path.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str(), path.string());
}

std::vector<std::string> preset_names() {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < kPresetCount; ++i) out.emplace_back(kPresets[i].name);
  return out;
}

std::optional<std::string_view> preset_text(std::string_view name) {
  for (std::size_t i = 0; i < kPresetCount; ++i) {
    if (name == kPresets[i].name) return std::string_view(kPresets[i].text);
  }
  return std::nullopt;
}

ExperimentConfig load_preset(std::string_view name) {
  const auto text = preset_text(name);
  if (!text) {
    std::string known;
    for (const auto& n : preset_names()) known += (known.empty() ? "" : ", ") + n;
    throw ConfigError("unknown preset '" + std::string(name) + "' (known: " + known + ")");
  }
  return parse_config(*text, "preset " + std::string(name));
}

void set_policy(ExperimentConfig& config, const Policy& policy) {
  config.policy_class = is_nsr(policy) ? PolicyClass::kNsr : PolicyClass::kOsr;
  config.requests = requests_of(policy);
  const auto rates = command_rates_of(policy);
  config.command_rates.assign(rates.begin(), rates.end());
  if (const auto* nsr = std::get_if<NsrPolicy>(&policy)) {
    config.threshold = nsr->threshold();
    config.tie_rule = nsr->tie_rule();
  }
  config.has_policy = true;
}

std::string to_config_json(const ExperimentConfig& config) {
  ordered_json root;
  const NetworkConfig& n = config.network;
  root["network"] = {{"num_cus", n.num_cus},
                     {"num_errhs", n.num_errhs},
                     {"num_cps", n.num_cps},
                     {"request_budget", n.request_budget},
                     {"command_budget", n.command_budget}};
  if (config.has_policy) {
    root["policy"] = {{"class", std::string(to_string(config.policy_class))},
                      {"requests", config.requests.to_rows()},
                      {"command_rates", config.command_rates},
                      {"threshold", config.threshold},
                      {"tie_rule", std::string(to_string(config.tie_rule))}};
  }
  const RunParams& p = config.simulation;
  root["simulation"] = {{"slots", p.slots},
                        {"warmup", p.warmup},
                        {"replications", p.replications},
                        {"seed", p.seed},
                        {"threads", p.threads}};
  if (config.sweep) {
    const SweepSpec& s = *config.sweep;
    ordered_json axes = ordered_json::array();
    for (const auto& a : s.axes) axes.push_back({{"name", a.name}, {"values", a.values}});
    root["sweep"] = {{"class", std::string(to_string(s.policy_class))},
                     {"threshold", s.threshold},
                     {"tie_rule", std::string(to_string(s.tie_rule))},
                     {"cp_rates", s.cp_rates},
                     {"command_rates", s.command_rates},
                     {"split_resolution", s.split_resolution},
                     {"optimal_policies", s.optimal_policies},
                     {"common_random_numbers", s.common_random_numbers},
                     {"argmin_metric", s.argmin_metric},
                     {"modes", {{"simulate", s.modes.simulate},
                                {"analytic", s.modes.analytic},
                                {"bounds", s.modes.bounds}}},
                     {"axes", axes}};
  }
  return root.dump(2) + "\n";
}

}  // namespace fran_aoi::cli
