// Copyright 2026 The LDPFL Authors
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

#ifndef LDPFL_RANDOM_H_
#define LDPFL_RANDOM_H_

#include <cstdint>
#include <random>

namespace ldpfl {

// All randomness in the library flows through this engine so that a master
// seed fixes every result bitwise.
using Engine = std::mt19937_64;

// Deterministic child seed for `stream` under `seed` (SplitMix64 mixing).
// Distinct (seed, stream) pairs give statistically independent engines.
uint64_t DeriveSeed(uint64_t seed, uint64_t stream);

// Convenience: an engine seeded with DeriveSeed(seed, stream).
Engine MakeEngine(uint64_t seed, uint64_t stream);

// Uniform double in [0, 1) built from the top 53 bits of one draw.
double UniformUnit(Engine& engine);

// True with probability `p`; p <= 0 never fires and p >= 1 always fires.
inline bool Bernoulli(Engine& engine, double p) {
  return UniformUnit(engine) < p;
}

// Named stream ids used when deriving child seeds from a master seed.
namespace streams {
inline constexpr uint64_t kPartition = 0x7061727469746e00;
inline constexpr uint64_t kSplit = 0x73706c6974000000;
inline constexpr uint64_t kExtractor = 0x6578747261637400;
inline constexpr uint64_t kRandomize = 0x72616e646f6d0000;
inline constexpr uint64_t kInit = 0x696e697400000000;
inline constexpr uint64_t kSelect = 0x73656c6563740000;
inline constexpr uint64_t kClient = 0x636c69656e740000;
}  // namespace streams

}  // namespace ldpfl

#endif  // LDPFL_RANDOM_H_
