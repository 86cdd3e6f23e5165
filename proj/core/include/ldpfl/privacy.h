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

#ifndef LDPFL_PRIVACY_H_
#define LDPFL_PRIVACY_H_

#include <cstdint>
#include <span>
#include <string>

#include "absl/status/statusor.h"
#include "ldpfl/bitcodec.h"
#include "ldpfl/randomizer.h"

namespace ldpfl {

struct PrivacyBudget {
  double epsilon = 0.0;
  // Free-form provenance, e.g. "THEOREM2" or "client 3".
  std::string mechanism;
};

struct SensitivityRecord {
  int64_t feature_count = 0;   // r
  int64_t bits_per_value = 0;  // l
  int64_t delta_f = 0;         // r * l
};

// ln(p(1-q) / ((1-p) q)). Fails if the ratio is <= 1.
absl::StatusOr<double> EpsilonFromPQ(double p, double q);

// Merged-string sensitivity r * (m + n + 1).
absl::StatusOr<SensitivityRecord> StringSensitivity(int64_t feature_count,
                                                   const CodecConfig& cfg);

// Composed worst-case likelihood ratio in log space, assembled the way the
// THEOREM1/THEOREM2 guarantees are: per-pair ratio
//   keep_one * keep_zero / ((1 - keep_zero) * (1 - keep_one))
// raised to rl/2 (THEOREM1) or S1 and S2 pair ratios each raised to rl/4
// (THEOREM2). UE/OUE specs are rejected; use EpsilonFromPQ for those.
absl::StatusOr<double> AnalyticLogRatio(const RandomizerSpec& spec);
// exp(AnalyticLogRatio(spec)); compare against e^epsilon.
absl::StatusOr<double> AnalyticRatio(const RandomizerSpec& spec);

// Sum of epsilons (same or overlapping data).
absl::StatusOr<PrivacyBudget> ComposeSequential(
    std::span<const PrivacyBudget> budgets);
// Maximum epsilon (disjoint data).
absl::StatusOr<PrivacyBudget> ComposeParallel(
    std::span<const PrivacyBudget> budgets);

inline constexpr int kMaxAuditBits = 8;
inline constexpr int64_t kMinAuditTrials = 100000;
inline constexpr int64_t kDefaultAuditFloor = 20;

// True when the number of positions with (v1=1, v2=0) equals the number with
// (v1=0, v2=1), and, for THEOREM2, the differing positions split evenly
// between even and odd indices.
bool IsBalancedPair(const RandomizerSpec& spec, const BitString& v1,
                    const BitString& v2);

// max over every output Q of ln Pr[A(v1)=Q] - ln Pr[A(v2)=Q], each
// probability formed as the full product of per-bit probabilities.
absl::StatusOr<double> ExactMaxLogRatio(const RandomizerSpec& spec,
                                        const BitString& v1,
                                        const BitString& v2);

// Monte-Carlo estimate of the same quantity from `trials` randomizations of
// each input, ignoring outputs seen fewer than `min_count` times under either
// input. trials == 0 selects ExactMaxLogRatio.
absl::StatusOr<double> EmpiricalEpsilon(const RandomizerSpec& spec,
                                        const BitString& v1,
                                        const BitString& v2, int64_t trials,
                                        uint64_t seed,
                                        int64_t min_count = kDefaultAuditFloor);

}  // namespace ldpfl

#endif  // LDPFL_PRIVACY_H_
