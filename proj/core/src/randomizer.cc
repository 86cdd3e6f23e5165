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

#include "ldpfl/randomizer.h"

#include <cctype>
#include <cmath>
#include <string>

#include "absl/strings/str_cat.h"
#include "ldpfl/internal/status_macros.h"

namespace ldpfl {
namespace {

// 1 / (1 + e^-x) without overflow for large |x|.
double Logistic(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

bool UsesAlpha(Mechanism m) {
  return m == Mechanism::kTheorem1 || m == Mechanism::kTheorem2;
}

}  // namespace

absl::StatusOr<Mechanism> ParseMechanism(std::string_view name) {
  std::string upper(name);
  for (char& c : upper) c = static_cast<char>(std::toupper(c));
  if (upper == "UE") return Mechanism::kUE;
  if (upper == "OUE") return Mechanism::kOUE;
  if (upper == "THEOREM1") return Mechanism::kTheorem1;
  if (upper == "THEOREM2") return Mechanism::kTheorem2;
  return absl::InvalidArgumentError(
      absl::StrCat("unknown mechanism '", std::string(name), "'"));
}

std::string_view MechanismName(Mechanism mechanism) {
  switch (mechanism) {
    case Mechanism::kUE:
      return "UE";
    case Mechanism::kOUE:
      return "OUE";
    case Mechanism::kTheorem1:
      return "THEOREM1";
    case Mechanism::kTheorem2:
      return "THEOREM2";
  }
  return "UNKNOWN";
}

absl::Status RandomizerSpec::Validate() const {
  switch (mechanism) {
    case Mechanism::kUE:
    case Mechanism::kOUE:
    case Mechanism::kTheorem1:
    case Mechanism::kTheorem2:
      break;
    default:
      return absl::InvalidArgumentError(absl::StrCat(
          "unknown mechanism id ", static_cast<int>(mechanism)));
  }
  if (!(epsilon > 0.0) || !std::isfinite(epsilon)) {
    return absl::InvalidArgumentError(
        absl::StrCat("epsilon must be positive and finite, got ", epsilon));
  }
  if (!UsesAlpha(mechanism)) return absl::OkStatus();
  if (!(alpha >= 1.0) || !std::isfinite(alpha)) {
    return absl::InvalidArgumentError(
        absl::StrCat("alpha must be >= 1, got ", alpha));
  }
  if (sensitivity < 2 || sensitivity % 2 != 0) {
    return absl::InvalidArgumentError(absl::StrCat(
        "sensitivity must be a positive even integer, got ", sensitivity));
  }
  if (mechanism == Mechanism::kTheorem2 && sensitivity % 4 != 0) {
    return absl::InvalidArgumentError(absl::StrCat(
        "THEOREM2 needs a sensitivity divisible by 4, got ", sensitivity));
  }
  return absl::OkStatus();
}

absl::StatusOr<double> BasicKeepProbability(double epsilon,
                                            int64_t sensitivity) {
  if (!(epsilon > 0.0) || sensitivity < 1) {
    return absl::InvalidArgumentError(
        absl::StrCat("need epsilon > 0 and sensitivity >= 1, got epsilon=",
                     epsilon, " sensitivity=", sensitivity));
  }
  return Logistic(epsilon / static_cast<double>(sensitivity));
}

absl::StatusOr<BitFlipProbabilities> ProbabilitiesFor(
    const RandomizerSpec& spec) {
  LDPFL_RETURN_IF_ERROR(spec.Validate());
  BitFlipProbabilities probs;
  switch (spec.mechanism) {
    case Mechanism::kUE: {
      LDPFL_ASSIGN_OR_RETURN(const double p,
                             BasicKeepProbability(spec.epsilon, 2));
      // q = 1/(1 + e^(eps/2)) = 1 - p, so zeros are kept with p as well.
      probs = {p, p, p, p};
      break;
    }
    case Mechanism::kOUE: {
      const double keep_zero = Logistic(spec.epsilon);
      probs = {0.5, keep_zero, 0.5, keep_zero};
      break;
    }
    case Mechanism::kTheorem1:
    case Mechanism::kTheorem2: {
      const double log_alpha = std::log(spec.alpha);
      const double per_pair =
          spec.epsilon / (static_cast<double>(spec.sensitivity) / 2.0);
      // alpha E / (1 + alpha E) with E = e^(eps / (rl/2)).
      const double keep_zero = Logistic(log_alpha + per_pair);
      if (spec.mechanism == Mechanism::kTheorem1) {
        const double keep_one = Logistic(-log_alpha);  // 1/(1+alpha)
        probs = {keep_one, keep_zero, keep_one, keep_zero};
      } else {
        const double keep_one_s1 = Logistic(log_alpha);         // a/(1+a)
        const double keep_one_s2 = Logistic(-3.0 * log_alpha);  // 1/(1+a^3)
        probs = {keep_one_s1, keep_zero, keep_one_s2, keep_zero};
      }
      break;
    }
  }
  return probs;
}

uint64_t RowSubstream(uint64_t seed, uint64_t row) {
  return DeriveSeed(DeriveSeed(seed, streams::kRandomize), row);
}

void RandomizeInto(const BitString& bits, const BitFlipProbabilities& probs,
                   Engine& engine, BitString& out) {
  if (out.size() != bits.size()) out = BitString(bits.size());
  // Hoisted per-parity thresholds; the loop body is a single comparison.
  const double one_if_one[2] = {probs.keep_one_even, probs.keep_one_odd};
  const double one_if_zero[2] = {1.0 - probs.keep_zero_even,
                                 1.0 - probs.keep_zero_odd};
  for (size_t i = 0; i < bits.size(); ++i) {
    const double p = bits[i] ? one_if_one[i & 1] : one_if_zero[i & 1];
    out.Set(i, Bernoulli(engine, p));
  }
}

absl::StatusOr<BitString> Randomize(const BitString& bits,
                                    const RandomizerSpec& spec,
                                    uint64_t seed) {
  LDPFL_ASSIGN_OR_RETURN(const BitFlipProbabilities probs,
                         ProbabilitiesFor(spec));
  if (UsesAlpha(spec.mechanism) &&
      bits.size() != static_cast<size_t>(spec.sensitivity)) {
    return absl::FailedPreconditionError(
        absl::StrCat("input has ", bits.size(),
                     " bits but the declared sensitivity is ",
                     spec.sensitivity));
  }
  Engine engine(seed);
  BitString out(bits.size());
  RandomizeInto(bits, probs, engine, out);
  return out;
}

absl::StatusOr<std::vector<BitString>> RandomizeDataset(
    std::span<const BitString> rows, const RandomizerSpec& spec,
    uint64_t seed) {
  std::vector<BitString> out;
  if (rows.empty()) return out;
  for (size_t i = 1; i < rows.size(); ++i) {
    if (rows[i].size() != rows[0].size()) {
      return absl::FailedPreconditionError(
          absl::StrCat("row ", i, " has ", rows[i].size(),
                       " bits, expected ", rows[0].size()));
    }
  }
  out.reserve(rows.size());
  for (size_t i = 0; i < rows.size(); ++i) {
    LDPFL_ASSIGN_OR_RETURN(BitString randomized,
                           Randomize(rows[i], spec, RowSubstream(seed, i)));
    out.push_back(std::move(randomized));
  }
  return out;
}

}  // namespace ldpfl
