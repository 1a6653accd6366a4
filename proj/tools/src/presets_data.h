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

// Preset configurations compiled into the binary (generated from
// tools/presets/*.json).

#ifndef FRAN_AOI_CLI_PRESETS_DATA_H_
#define FRAN_AOI_CLI_PRESETS_DATA_H_

#include <cstddef>

namespace fran_aoi::cli {

struct PresetEntry {
  const char* name;
  const char* text;
};

extern const PresetEntry kPresets[];
extern const std::size_t kPresetCount;

}  // namespace fran_aoi::cli

#endif  // FRAN_AOI_CLI_PRESETS_DATA_H_
