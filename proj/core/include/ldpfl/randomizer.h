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

#ifndef LDPFL_RANDOMIZER_H_
#define LDPFL_RANDOMIZER_H_

#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "ldpfl/bitcodec.h"
#include "ldpfl/random.h"

namespace ldpfl {

enum class Mechanism {
  // Unary encoding randomized response at sensitivity 2.
  kUE,
  // Optimized unary encoding: p = 1/2, q = 1/(1 + e^eps).
  kOUE,
  // Single-model randomizer for long merged strings, coefficient alpha.
  kTheorem1,
  // Split randomizer: even positions (S1) and odd positions (S2) use
  // different keep-one probabilities.
  kTheorem2,
};

// Accepts "UE", "OUE", "THEOREM1", "THEOREM2" (case-insensitive).
absl::StatusOr<Mechanism> ParseMechanism(std::string_view name);
std::string_view MechanismName(Mechanism mechanism);

struct RandomizerSpec {
  Mechanism mechanism = Mechanism::kTheorem2;
  double epsilon = 0.5;
  // Privacy budget coefficient; only THEOREM1/THEOREM2 read it.
  double alpha = 10.0;
  // Merged-string length rl; only THEOREM1/THEOREM2 read it. Must be even,
  // and divisible by 4 for THEOREM2.
  int64_t sensitivity = 0;

  absl::Status Validate() const;
};

// Per-position flip model. "Even" entries apply to 0-based even positions
// (S1), "odd" entries to odd positions (S2).
struct BitFlipProbabilities {
  double keep_one_even = 1.0;   // Pr[out 1 | in 1] on S1
  double keep_zero_even = 1.0;  // Pr[out 0 | in 0] on S1
  double keep_one_odd = 1.0;
  double keep_zero_odd = 1.0;

  double KeepOne(size_t position) const {
    return position % 2 == 0 ? keep_one_even : keep_one_odd;
  }
  double KeepZero(size_t position) const {
    return position % 2 == 0 ? keep_zero_even : keep_zero_odd;
  }
  // Pr[out 1 | in]. The quantity every sampler draws against.
  double OneProbability(size_t position, uint8_t input) const {
    return input ? KeepOne(position) : 1.0 - KeepZero(position);
  }
};

// e^(eps/sensitivity) / (1 + e^(eps/sensitivity)).
absl::StatusOr<double> BasicKeepProbability(double epsilon,
                                            int64_t sensitivity);

absl::StatusOr<BitFlipProbabilities> ProbabilitiesFor(
    const RandomizerSpec& spec);

// Seed of the substream used for row `row` of a dataset randomized under
// `seed`.
uint64_t RowSubstream(uint64_t seed, uint64_t row);

// Flips every bit independently. For THEOREM1/THEOREM2 the input length must
// equal spec.sensitivity.
absl::StatusOr<BitString> Randomize(const BitString& bits,
                                    const RandomizerSpec& spec,
                                    uint64_t seed);

// Low-level sampler with no validation. Writes into `out` (resized).
void RandomizeInto(const BitString& bits, const BitFlipProbabilities& probs,
                   Engine& engine, BitString& out);

// Row i is randomized with seed RowSubstream(seed, i). All rows must have the
// same length.
absl::StatusOr<std::vector<BitString>> RandomizeDataset(
    std::span<const BitString> rows, const RandomizerSpec& spec,
    uint64_t seed);

}  // namespace ldpfl

#endif  // LDPFL_RANDOMIZER_H_
