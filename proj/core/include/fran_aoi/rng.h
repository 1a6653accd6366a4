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

#ifndef FRAN_AOI_RNG_H_
#define FRAN_AOI_RNG_H_

#include <cstdint>
#include <random>

namespace fran_aoi {

// Explicitly seeded 64-bit Mersenne Twister. Uniform doubles are built from
// the top 53 bits so draws are identical across standard libraries.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }

  // Uniform on [0, 1).
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  bool bernoulli(double p) { return uniform() < p; }

 private:
  std::mt19937_64 engine_;
};

// Stream-splitting rule: stream i of a run seeded with `seed` uses seed ^ i.
std::uint64_t stream_seed(std::uint64_t seed, std::uint64_t stream);

}  // namespace fran_aoi

#endif  // FRAN_AOI_RNG_H_
