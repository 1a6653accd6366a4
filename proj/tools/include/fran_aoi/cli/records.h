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

// Flat output records and their CSV/JSON encodings.

#ifndef FRAN_AOI_CLI_RECORDS_H_
#define FRAN_AOI_CLI_RECORDS_H_

#include <cstdint>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "fran_aoi/optimizer.h"
#include "fran_aoi/simulator.h"

namespace fran_aoi::cli {

struct ExperimentConfig;

using Value = std::variant<double, std::int64_t, std::uint64_t, std::string>;

// Ordered key/value pairs.
class Record {
 public:
  void set(std::string key, Value value);
  const std::vector<std::pair<std::string, Value>>& fields() const { return fields_; }
  const Value* find(std::string_view key) const;

 private:
  std::vector<std::pair<std::string, Value>> fields_;
};

enum class Format { kCsv, kJson };
Format parse_format(std::string_view text);

// Shortest round-trip decimal; "inf"/"-inf" for infinities, "" for NaN.
std::string format_number(double value);
std::string csv_escape(std::string_view field);

// A single record as header + row (CSV) or one JSON object.
std::string render(const Record& record, Format format);
// Many records sharing `header` (CSV) or a JSON array.
std::string render_table(const std::vector<std::string>& header, const std::vector<Record>& rows,
                         Format format);

// Network, policy and simulation inputs: num_cus ... command_budget, class,
// threshold, tie_rule, b_<k>_<n>, r_<k>, slots, warmup, replications, seed,
// threads. Indices are 1-based.
void echo_inputs(Record& record, const NetworkConfig& network, const Policy& policy,
                 const RunParams& simulation);
void add_sim_stats(Record& record, const SimStats& stats);

std::vector<std::string> sweep_header(const SweepSpec& spec, const NetworkConfig& network);
std::vector<Record> sweep_records(const SweepSpec& spec, const SweepResult& result);

}  // namespace fran_aoi::cli

#endif  // FRAN_AOI_CLI_RECORDS_H_
