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

// Command-line front end. Exit codes: 0 success, 1 runtime failure,
// 2 usage or validation error.

#ifndef FRAN_AOI_CLI_COMMANDS_H_
#define FRAN_AOI_CLI_COMMANDS_H_

#include <ostream>
#include <string>
#include <vector>

namespace fran_aoi::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitRuntime = 1;
inline constexpr int kExitUsage = 2;

// Output goes to `out` (or --out) only once the command has fully succeeded.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace fran_aoi::cli

#endif  // FRAN_AOI_CLI_COMMANDS_H_
