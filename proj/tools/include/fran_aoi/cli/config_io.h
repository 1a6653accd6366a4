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

// Experiment configuration files: JSON, either nested
//
//   {"network": {...}, "policy": {...}, "simulation": {...}, "sweep": {...}}
//
// or the flat map emitted by the simulate/analyze/optimal records.

#ifndef FRAN_AOI_CLI_CONFIG_IO_H_
#define FRAN_AOI_CLI_CONFIG_IO_H_

#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "fran_aoi/model.h"
#include "fran_aoi/optimizer.h"
#include "fran_aoi/simulator.h"

namespace fran_aoi::cli {

// Parse or validation failure; maps to exit code 2.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ExperimentConfig {
  NetworkConfig network;
  PolicyClass policy_class = PolicyClass::kOsr;
  RequestRates requests;
  std::vector<double> command_rates;
  int threshold = 3;
  TieRule tie_rule = TieRule::kMeanRate;
  bool has_policy = false;
  RunParams simulation;
  std::optional<SweepSpec> sweep;

  // Throws ConfigError when no policy section was given.
  Policy policy() const;
};

ExperimentConfig parse_config(std::string_view text, const std::string& source = "<config>");
ExperimentConfig load_config(const std::filesystem::path& path);

std::vector<std::string> preset_names();
std::optional<std::string_view> preset_text(std::string_view name);
// Throws ConfigError for unknown names.
ExperimentConfig load_preset(std::string_view name);

// Nested JSON that parse_config reads back unchanged.
std::string to_config_json(const ExperimentConfig& config);

// Copies the class, threshold, tie rule and rates of `policy` into `config`.
void set_policy(ExperimentConfig& config, const Policy& policy);

}  // namespace fran_aoi::cli

#endif  // FRAN_AOI_CLI_CONFIG_IO_H_
