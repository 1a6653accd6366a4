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

#include "fran_aoi/cli/records.h"

#include <charconv>
#include <cmath>
#include <stdexcept>

#include "json.hpp"

namespace fran_aoi::cli {

void Record::set(std::string key, Value value) {
  for (auto& [k, v] : fields_) {
    if (k == key) {
      v = std::move(value);
      return;
    }
  }
  fields_.emplace_back(std::move(key), std::move(value));
}

const Value* Record::find(std::string_view key) const {
  for (const auto& [k, v] : fields_) {
    if (k == key) return &v;
  }
  return nullptr;
}

Format parse_format(std::string_view text) {
  if (text == "csv") return Format::kCsv;
  if (text == "json") return Format::kJson;
  throw std::invalid_argument("unknown format '" + std::string(text) + "' (expected csv or json)");
}

std::string format_number(double value) {
  if (std::isnan(value)) return "";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, value);
  return std::string(buf, res.ptr);
}

std::string csv_escape(std::string_view field) {
  if (field.find_first_of(",\"\r\n") == std::string_view::npos) return std::string(field);
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

namespace {

std::string csv_cell(const Value& v) {
  if (const auto* d = std::get_if<double>(&v)) return format_number(*d);
  if (const auto* i = std::get_if<std::int64_t>(&v)) return std::to_string(*i);
  if (const auto* u = std::get_if<std::uint64_t>(&v)) return std::to_string(*u);
  return csv_escape(std::get<std::string>(v));
}

nlohmann::ordered_json json_value(const Value& v) {
  if (const auto* d = std::get_if<double>(&v)) {
    if (std::isnan(*d)) return nullptr;
    if (std::isinf(*d)) return format_number(*d);
    return *d;
  }
  if (const auto* i = std::get_if<std::int64_t>(&v)) return *i;
  if (const auto* u = std::get_if<std::uint64_t>(&v)) return *u;
  return std::get<std::string>(v);
}

nlohmann::ordered_json json_object(const Record& record) {
  nlohmann::ordered_json obj = nlohmann::ordered_json::object();
  for (const auto& [k, v] : record.fields()) obj[k] = json_value(v);
  return obj;
}

std::string csv_line(const std::vector<std::string>& cells) {
  std::string line;
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i) line += ',';
    line += cells[i];
  }
  return line + "\r\n";
}

}  // namespace

std::string render(const Record& record, Format format) {
  if (format == Format::kJson) return json_object(record).dump(2) + "\n";
  std::vector<std::string> header;
  std::vector<std::string> row;
  for (const auto& [k, v] : record.fields()) {
    header.push_back(csv_escape(k));
    row.push_back(csv_cell(v));
  }
  return csv_line(header) + csv_line(row);
}

std::string render_table(const std::vector<std::string>& header, const std::vector<Record>& rows,
                         Format format) {
  if (format == Format::kJson) {
    nlohmann::ordered_json arr = nlohmann::ordered_json::array();
    for (const auto& r : rows) arr.push_back(json_object(r));
    return arr.dump(2) + "\n";
  }
  std::vector<std::string> cells;
  for (const auto& h : header) cells.push_back(csv_escape(h));
  std::string out = csv_line(cells);
  for (const auto& r : rows) {
    cells.clear();
    for (const auto& h : header) {
      const Value* v = r.find(h);
      cells.push_back(v ? csv_cell(*v) : std::string());
    }
    out += csv_line(cells);
  }
  return out;
}

namespace {

void echo_network(Record& record, const NetworkConfig& n) {
  record.set("num_cus", std::int64_t{n.num_cus});
  record.set("num_errhs", std::int64_t{n.num_errhs});
  record.set("num_cps", std::int64_t{n.num_cps});
  record.set("request_budget", n.request_budget);
  record.set("command_budget", n.command_budget);
}

void echo_policy(Record& record, PolicyClass cls, int threshold, TieRule tie_rule,
                 const RequestRates& requests, std::span<const double> rates) {
  record.set("class", std::string(to_string(cls)));
  record.set("threshold", std::int64_t{threshold});
  record.set("tie_rule", std::string(to_string(tie_rule)));
  for (int k = 0; k < requests.num_cps(); ++k) {
    for (int n = 0; n < requests.num_errhs(); ++n) {
      record.set("b_" + std::to_string(k + 1) + "_" + std::to_string(n + 1), requests(k, n));
    }
  }
  for (std::size_t k = 0; k < rates.size(); ++k) record.set("r_" + std::to_string(k + 1), rates[k]);
}

void echo_simulation(Record& record, const RunParams& p) {
  record.set("slots", p.slots);
  record.set("warmup", p.warmup);
  record.set("replications", std::int64_t{p.replications});
  record.set("seed", p.seed);
  record.set("threads", std::int64_t{p.threads});
}

}  // namespace

void echo_inputs(Record& record, const NetworkConfig& network, const Policy& policy,
                 const RunParams& simulation) {
  echo_network(record, network);
  int threshold = 3;
  TieRule tie = TieRule::kMeanRate;
  if (const auto* nsr = std::get_if<NsrPolicy>(&policy)) {
    threshold = nsr->threshold();
    tie = nsr->tie_rule();
  }
  echo_policy(record, is_nsr(policy) ? PolicyClass::kNsr : PolicyClass::kOsr, threshold, tie,
              requests_of(policy), command_rates_of(policy));
  echo_simulation(record, simulation);
}

void add_sim_stats(Record& record, const SimStats& stats) {
  record.set("je_hat", stats.je_hat);
  record.set("jc_hat", stats.jc_hat);
  record.set("stderr_je", stats.stderr_je);
  record.set("stderr_jc", stats.stderr_jc);
  record.set("slots_used", stats.slots_used);
}

std::vector<std::string> sweep_header(const SweepSpec& spec, const NetworkConfig& network) {
  std::vector<std::string> h;
  for (const auto& a : spec.axes) h.push_back(a.name);
  Record proto;
  echo_network(proto, network);
  RequestRates zero(network.num_cps, network.num_errhs, 0.0);
  const std::vector<double> rates(network.num_cps, 0.0);
  echo_policy(proto, spec.policy_class, spec.threshold, spec.tie_rule, zero, rates);
  echo_simulation(proto, spec.simulation);
  for (const auto& [k, _] : proto.fields()) h.push_back(k);
  for (const char* k : {"je_theory", "je_sim", "jc_sim", "jc_bound_fresh", "jc_bound_replace",
                        "stderr_je", "stderr_jc", "status"}) {
    h.emplace_back(k);
  }
  return h;
}

std::vector<Record> sweep_records(const SweepSpec& spec, const SweepResult& result) {
  std::vector<Record> out;
  out.reserve(result.rows.size());
  for (const SweepRow& row : result.rows) {
    Record r;
    for (std::size_t i = 0; i < result.axis_names.size(); ++i) r.set(result.axis_names[i], row.axis_values[i]);
    echo_network(r, result.config);
    echo_policy(r, row.policy_class, row.threshold, spec.tie_rule, row.requests, row.command_rates);
    RunParams sim = spec.simulation;
    sim.seed = row.seed;
    echo_simulation(r, sim);
    r.set("je_theory", row.je_theory);
    r.set("je_sim", row.je_sim);
    r.set("jc_sim", row.jc_sim);
    r.set("jc_bound_fresh", row.jc_bound_fresh);
    r.set("jc_bound_replace", row.jc_bound_replace);
    r.set("stderr_je", row.stderr_je);
    r.set("stderr_jc", row.stderr_jc);
    r.set("status", row.status);
    out.push_back(std::move(r));
  }
  return out;
}

}  // namespace fran_aoi::cli
