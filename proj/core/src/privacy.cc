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

#include "ldpfl/privacy.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "absl/strings/str_cat.h"
#include "ldpfl/internal/status_macros.h"

namespace ldpfl {
namespace {

double PairLogRatio(double keep_one, double keep_zero) {
  return std::log(keep_one) + std::log(keep_zero) - std::log1p(-keep_zero) -
         std::log1p(-keep_one);
}

absl::Status CheckAuditInputs(const RandomizerSpec& spec, const BitString& v1,
                              const BitString& v2) {
  LDPFL_RETURN_IF_ERROR(spec.Validate());
  if (v1.size() != v2.size()) {
    return absl::FailedPreconditionError(absl::StrCat(
        "audit inputs differ in length: ", v1.size(), " vs ", v2.size()));
  }
  if (v1.empty() || v1.size() > static_cast<size_t>(kMaxAuditBits)) {
    return absl::FailedPreconditionError(absl::StrCat(
        "audit inputs must have 1..", kMaxAuditBits, " bits, got ",
        v1.size()));
  }
  const bool long_string = spec.mechanism == Mechanism::kTheorem1 ||
                           spec.mechanism == Mechanism::kTheorem2;
  if (long_string && v1.size() != static_cast<size_t>(spec.sensitivity)) {
    return absl::FailedPreconditionError(
        absl::StrCat("audit inputs have ", v1.size(),
                     " bits but the sensitivity is ", spec.sensitivity));
  }
  if (spec.mechanism == Mechanism::kTheorem2) {
    int even = 0;
    int odd = 0;
    for (size_t i = 0; i < v1.size(); ++i) {
      if (v1[i] != v2[i]) (i % 2 == 0 ? even : odd)++;
    }
    if (even != odd) {
      return absl::FailedPreconditionError(absl::StrCat(
          "THEOREM2 audit needs differences split evenly between S1 and S2, "
          "got ",
          even, " and ", odd));
    }
  }
  return absl::OkStatus();
}

// Correctly rounded sum of finite values (Shewchuk partials), so that
// budgets such as 0.1 + 0.2 + 0.3 compose to exactly 0.6.
double ExactSum(std::span<const PrivacyBudget> budgets) {
  std::vector<double> partials;
  for (const PrivacyBudget& b : budgets) {
    double x = b.epsilon;
    size_t kept = 0;
    for (double y : partials) {
      if (std::fabs(x) < std::fabs(y)) std::swap(x, y);
      const double hi = x + y;
      const double lo = y - (hi - x);
      if (lo != 0.0) partials[kept++] = lo;
      x = hi;
    }
    partials.resize(kept);
    partials.push_back(x);
  }
  if (partials.empty()) return 0.0;
  size_t n = partials.size();
  double hi = partials[--n];
  double lo = 0.0;
  while (n > 0) {
    const double x = hi;
    const double y = partials[--n];
    hi = x + y;
    lo = y - (hi - x);
    if (lo != 0.0) break;
  }
  // Round half-way cases the way a single exact rounding would.
  if (n > 0 && ((lo < 0.0 && partials[n - 1] < 0.0) ||
                (lo > 0.0 && partials[n - 1] > 0.0))) {
    const double y = lo * 2.0;
    const double x = hi + y;
    if (y == x - hi) hi = x;
  }
  return hi;
}

size_t OutputIndex(const BitString& bits) {
  size_t index = 0;
  for (size_t i = 0; i < bits.size(); ++i) index = (index << 1) | bits[i];
  return index;
}

}  // namespace

absl::StatusOr<double> EpsilonFromPQ(double p, double q) {
  if (!(p > 0.0 && p < 1.0 && q > 0.0 && q < 1.0)) {
    return absl::InvalidArgumentError(
        absl::StrCat("p and q must lie in (0, 1), got p=", p, " q=", q));
  }
  const double log_ratio =
      std::log(p) + std::log1p(-q) - std::log1p(-p) - std::log(q);
  if (!(p > q)) {
    return absl::InvalidArgumentError(absl::StrCat(
        "p(1-q) / ((1-p)q) must exceed 1; got log ratio ", log_ratio));
  }
  return log_ratio;
}

absl::StatusOr<SensitivityRecord> StringSensitivity(int64_t feature_count,
                                                   const CodecConfig& cfg) {
  if (feature_count < 1) {
    return absl::InvalidArgumentError(
        absl::StrCat("feature count must be >= 1, got ", feature_count));
  }
  SensitivityRecord record;
  record.feature_count = feature_count;
  record.bits_per_value = cfg.bits_per_value();
  record.delta_f = feature_count * record.bits_per_value;
  return record;
}

absl::StatusOr<double> AnalyticLogRatio(const RandomizerSpec& spec) {
  if (spec.mechanism != Mechanism::kTheorem1 &&
      spec.mechanism != Mechanism::kTheorem2) {
    return absl::InvalidArgumentError(
        absl::StrCat("analytic ratio is defined for THEOREM1/THEOREM2 only; ",
                     std::string(MechanismName(spec.mechanism)),
                     " should use EpsilonFromPQ"));
  }
  LDPFL_ASSIGN_OR_RETURN(const BitFlipProbabilities probs,
                         ProbabilitiesFor(spec));
  const double rl = static_cast<double>(spec.sensitivity);
  if (spec.mechanism == Mechanism::kTheorem1) {
    return (rl / 2.0) * PairLogRatio(probs.keep_one_even, probs.keep_zero_even);
  }
  return (rl / 4.0) * PairLogRatio(probs.keep_one_even, probs.keep_zero_even) +
         (rl / 4.0) * PairLogRatio(probs.keep_one_odd, probs.keep_zero_odd);
}

absl::StatusOr<double> AnalyticRatio(const RandomizerSpec& spec) {
  LDPFL_ASSIGN_OR_RETURN(const double log_ratio, AnalyticLogRatio(spec));
  return std::exp(log_ratio);
}

absl::StatusOr<PrivacyBudget> ComposeSequential(
    std::span<const PrivacyBudget> budgets) {
  if (budgets.empty()) {
    return absl::InvalidArgumentError("cannot compose an empty budget list");
  }
  for (const PrivacyBudget& b : budgets) {
    if (!(b.epsilon >= 0.0) || !std::isfinite(b.epsilon)) {
      return absl::InvalidArgumentError(
          absl::StrCat("budget '", b.mechanism, "' has invalid epsilon ", b.epsilon));
    }
  }
  return PrivacyBudget{ExactSum(budgets), "sequential"};
}

absl::StatusOr<PrivacyBudget> ComposeParallel(
    std::span<const PrivacyBudget> budgets) {
  if (budgets.empty()) {
    return absl::InvalidArgumentError("cannot compose an empty budget list");
  }
  PrivacyBudget out{budgets.front().epsilon, "parallel"};
  for (const PrivacyBudget& b : budgets) {
    out.epsilon = std::max(out.epsilon, b.epsilon);
  }
  return out;
}

bool IsBalancedPair(const RandomizerSpec& spec, const BitString& v1,
                    const BitString& v2) {
  if (v1.size() != v2.size()) return false;
  int dropped = 0;
  int raised = 0;
  int even = 0;
  int odd = 0;
  for (size_t i = 0; i < v1.size(); ++i) {
    if (v1[i] == v2[i]) continue;
    (v1[i] ? dropped : raised)++;
    (i % 2 == 0 ? even : odd)++;
  }
  if (dropped != raised) return false;
  return spec.mechanism != Mechanism::kTheorem2 || even == odd;
}

absl::StatusOr<double> ExactMaxLogRatio(const RandomizerSpec& spec,
                                        const BitString& v1,
                                        const BitString& v2) {
  LDPFL_RETURN_IF_ERROR(CheckAuditInputs(spec, v1, v2));
  LDPFL_ASSIGN_OR_RETURN(const BitFlipProbabilities probs,
                         ProbabilitiesFor(spec));
  const size_t bits = v1.size();
  double best = -std::numeric_limits<double>::infinity();
  for (size_t q = 0; q < (size_t{1} << bits); ++q) {
    double pr1 = 1.0;
    double pr2 = 1.0;
    for (size_t i = 0; i < bits; ++i) {
      const bool out_one = (q >> (bits - 1 - i)) & 1u;
      const double one1 = probs.OneProbability(i, v1[i]);
      const double one2 = probs.OneProbability(i, v2[i]);
      pr1 *= out_one ? one1 : 1.0 - one1;
      pr2 *= out_one ? one2 : 1.0 - one2;
    }
    if (pr1 == 0.0) continue;
    if (pr2 == 0.0) return std::numeric_limits<double>::infinity();
    best = std::max(best, std::log(pr1) - std::log(pr2));
  }
  return best;
}

absl::StatusOr<double> EmpiricalEpsilon(const RandomizerSpec& spec,
                                        const BitString& v1,
                                        const BitString& v2, int64_t trials,
                                        uint64_t seed, int64_t min_count) {
  if (trials == 0) return ExactMaxLogRatio(spec, v1, v2);
  LDPFL_RETURN_IF_ERROR(CheckAuditInputs(spec, v1, v2));
  if (trials < kMinAuditTrials) {
    return absl::FailedPreconditionError(absl::StrCat(
        "Monte-Carlo audit needs at least ", kMinAuditTrials,
        " trials, got ", trials));
  }
  LDPFL_ASSIGN_OR_RETURN(const BitFlipProbabilities probs,
                         ProbabilitiesFor(spec));
  const size_t outputs = size_t{1} << v1.size();
  std::vector<int64_t> counts1(outputs, 0);
  std::vector<int64_t> counts2(outputs, 0);
  Engine engine1 = MakeEngine(seed, 1);
  Engine engine2 = MakeEngine(seed, 2);
  BitString scratch(v1.size());
  for (int64_t t = 0; t < trials; ++t) {
    RandomizeInto(v1, probs, engine1, scratch);
    ++counts1[OutputIndex(scratch)];
    RandomizeInto(v2, probs, engine2, scratch);
    ++counts2[OutputIndex(scratch)];
  }
  double best = -std::numeric_limits<double>::infinity();
  for (size_t q = 0; q < outputs; ++q) {
    if (counts1[q] < min_count || counts2[q] < min_count) continue;
    best = std::max(best, std::log(static_cast<double>(counts1[q])) -
                              std::log(static_cast<double>(counts2[q])));
  }
  if (!std::isfinite(best)) {
    return absl::FailedPreconditionError(absl::StrCat(
        "no output was observed at least ", min_count,
        " times under both inputs"));
  }
  return best;
}

}  // namespace ldpfl
