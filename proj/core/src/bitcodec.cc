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

#include "ldpfl/bitcodec.h"

#include <cmath>
#include <cstdint>

#include "absl/status/status.h"
#include "absl/strings/str_cat.h"

namespace ldpfl {
namespace {

constexpr int kMaxMagnitudeBits = 52;

// Writes the l-bit encoding of `x` into out[offset, offset + l).
void EncodeInto(double x, const CodecConfig& cfg, std::vector<uint8_t>& out,
                size_t offset) {
  const int magnitude_bits = cfg.integer_bits() + cfg.fraction_bits();
  const uint64_t max_scaled = (uint64_t{1} << magnitude_bits) - 1;
  const double magnitude = std::fabs(x);

  uint64_t scaled = max_scaled;
  if (magnitude < cfg.max_magnitude()) {
    // Scaling by 2^n is exact, so the floor is the true truncation.
    scaled = static_cast<uint64_t>(
        std::floor(std::ldexp(magnitude, cfg.fraction_bits())));
    if (scaled > max_scaled) scaled = max_scaled;
  }

  out[offset] = x < 0.0 ? 1 : 0;
  for (int i = 0; i < magnitude_bits; ++i) {
    const int shift = magnitude_bits - 1 - i;
    out[offset + 1 + i] = static_cast<uint8_t>((scaled >> shift) & 1u);
  }
}

double DecodeAt(std::span<const uint8_t> bits, const CodecConfig& cfg) {
  const int magnitude_bits = cfg.integer_bits() + cfg.fraction_bits();
  uint64_t scaled = 0;
  for (int i = 0; i < magnitude_bits; ++i) {
    scaled = (scaled << 1) | bits[1 + i];
  }
  const double magnitude =
      std::ldexp(static_cast<double>(scaled), -cfg.fraction_bits());
  return bits[0] ? -magnitude : magnitude;
}

}  // namespace

absl::StatusOr<BitString> BitString::FromBits(std::vector<uint8_t> bits) {
  for (size_t i = 0; i < bits.size(); ++i) {
    if (bits[i] > 1) {
      return absl::InvalidArgumentError(
          absl::StrCat("bit ", i, " has non-binary value ", static_cast<int>(bits[i])));
    }
  }
  BitString out;
  out.bits_ = std::move(bits);
  return out;
}

absl::StatusOr<BitString> BitString::Parse(std::string_view text) {
  std::vector<uint8_t> bits;
  bits.reserve(text.size());
  for (char c : text) {
    if (c != '0' && c != '1') {
      return absl::InvalidArgumentError(
          absl::StrCat("invalid bit character '", std::string(1, c), "'"));
    }
    bits.push_back(c == '1' ? 1 : 0);
  }
  return FromBits(std::move(bits));
}

void BitString::Append(const BitString& other) {
  bits_.insert(bits_.end(), other.bits_.begin(), other.bits_.end());
}

size_t BitString::CountOnes() const {
  size_t ones = 0;
  for (uint8_t b : bits_) ones += b;
  return ones;
}

std::string BitString::ToString() const {
  std::string out(bits_.size(), '0');
  for (size_t i = 0; i < bits_.size(); ++i) {
    if (bits_[i]) out[i] = '1';
  }
  return out;
}

absl::StatusOr<CodecConfig> CodecConfig::Create(int integer_bits,
                                                int fraction_bits) {
  if (integer_bits < 0 || fraction_bits < 0) {
    return absl::InvalidArgumentError(
        absl::StrCat("codec bit counts must be non-negative, got m=",
                     integer_bits, " n=", fraction_bits));
  }
  if (integer_bits + fraction_bits > kMaxMagnitudeBits) {
    return absl::InvalidArgumentError(
        absl::StrCat("m + n must not exceed ", kMaxMagnitudeBits, ", got ",
                     integer_bits + fraction_bits));
  }
  return CodecConfig(integer_bits, fraction_bits);
}

double CodecConfig::max_magnitude() const {
  return std::ldexp(1.0, integer_bits_) - resolution();
}

double CodecConfig::resolution() const {
  return std::ldexp(1.0, -fraction_bits_);
}

absl::StatusOr<BitString> EncodeValue(double x, const CodecConfig& cfg) {
  if (!std::isfinite(x)) {
    return absl::InvalidArgumentError("cannot encode a non-finite value");
  }
  std::vector<uint8_t> bits(cfg.bits_per_value());
  EncodeInto(x, cfg, bits, 0);
  return BitString::FromBits(std::move(bits));
}

absl::StatusOr<double> DecodeValue(const BitString& bits,
                                   const CodecConfig& cfg) {
  if (bits.size() != static_cast<size_t>(cfg.bits_per_value())) {
    return absl::FailedPreconditionError(
        absl::StrCat("expected ", cfg.bits_per_value(), " bits, got ",
                     bits.size()));
  }
  return DecodeAt(bits.bits(), cfg);
}

absl::StatusOr<BitString> EncodeVector(std::span<const double> values,
                                       const CodecConfig& cfg) {
  if (values.empty()) {
    return absl::InvalidArgumentError("cannot encode an empty vector");
  }
  const size_t width = cfg.bits_per_value();
  std::vector<uint8_t> bits(values.size() * width);
  for (size_t i = 0; i < values.size(); ++i) {
    if (!std::isfinite(values[i])) {
      return absl::InvalidArgumentError(
          absl::StrCat("element ", i, " is not finite"));
    }
    EncodeInto(values[i], cfg, bits, i * width);
  }
  return BitString::FromBits(std::move(bits));
}

absl::StatusOr<FeatureVector> DecodeVector(const BitString& bits,
                                           const CodecConfig& cfg) {
  const size_t width = cfg.bits_per_value();
  if (bits.size() % width != 0) {
    return absl::FailedPreconditionError(
        absl::StrCat("bit length ", bits.size(),
                     " is not a multiple of the value width ", width));
  }
  FeatureVector out(bits.size() / width);
  const auto all = bits.bits();
  for (size_t i = 0; i < out.size(); ++i) {
    out[i] = DecodeAt(all.subspan(i * width, width), cfg);
  }
  return out;
}

FeatureVector BitsToFeatures(const BitString& bits) {
  FeatureVector out(bits.size());
  for (size_t i = 0; i < bits.size(); ++i) out[i] = bits[i];
  return out;
}

}  // namespace ldpfl
