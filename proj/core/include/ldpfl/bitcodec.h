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

#ifndef LDPFL_BITCODEC_H_
#define LDPFL_BITCODEC_H_

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "absl/status/statusor.h"

namespace ldpfl {

// A flattened real-valued feature vector (the tapped extractor output).
using FeatureVector = std::vector<double>;

// Fixed-length sequence of bits. Every element is exactly 0 or 1.
class BitString {
 public:
  BitString() = default;
  // All-zero string of `length` bits.
  explicit BitString(size_t length) : bits_(length, 0) {}

  // Fails with InvalidArgument if any element is not 0 or 1.
  static absl::StatusOr<BitString> FromBits(std::vector<uint8_t> bits);
  // Parses a string of '0' and '1' characters, e.g. "1010".
  static absl::StatusOr<BitString> Parse(std::string_view text);

  size_t size() const { return bits_.size(); }
  bool empty() const { return bits_.empty(); }
  uint8_t operator[](size_t i) const { return bits_[i]; }
  void Set(size_t i, bool value) { bits_[i] = value ? 1 : 0; }
  void Append(const BitString& other);
  size_t CountOnes() const;

  std::span<const uint8_t> bits() const { return bits_; }
  std::string ToString() const;

  friend bool operator==(const BitString&, const BitString&) = default;

 private:
  std::vector<uint8_t> bits_;
};

// Fixed-point layout of one encoded value: a sign bit, `integer_bits` whole
// number bits and `fraction_bits` fraction bits.
class CodecConfig {
 public:
  // Requires integer_bits, fraction_bits >= 0 and integer_bits +
  // fraction_bits <= 52 so every representable value is an exact double.
  static absl::StatusOr<CodecConfig> Create(int integer_bits,
                                            int fraction_bits);
  // m = 4, n = 5, l = 10.
  static CodecConfig Default() { return CodecConfig(4, 5); }

  int integer_bits() const { return integer_bits_; }
  int fraction_bits() const { return fraction_bits_; }
  // l = m + n + 1.
  int bits_per_value() const { return integer_bits_ + fraction_bits_ + 1; }
  // 2^m - 2^-n.
  double max_magnitude() const;
  // 2^-n.
  double resolution() const;

  friend bool operator==(const CodecConfig&, const CodecConfig&) = default;

 private:
  CodecConfig(int integer_bits, int fraction_bits)
      : integer_bits_(integer_bits), fraction_bits_(fraction_bits) {}

  int integer_bits_;
  int fraction_bits_;
};

// Encodes one real as [sign | integer bits MSB first | fraction bits MSB
// first]. The magnitude is truncated to a multiple of 2^-n and saturates at
// max_magnitude(). Non-finite input is an InvalidArgument error.
absl::StatusOr<BitString> EncodeValue(double x, const CodecConfig& cfg);

// Inverse of EncodeValue. `bits` must hold exactly l bits.
absl::StatusOr<double> DecodeValue(const BitString& bits,
                                   const CodecConfig& cfg);

// Concatenation of EncodeValue over `values`; the result has r * l bits.
absl::StatusOr<BitString> EncodeVector(std::span<const double> values,
                                       const CodecConfig& cfg);

// Per-value decode of a merged string whose length is a multiple of l.
absl::StatusOr<FeatureVector> DecodeVector(const BitString& bits,
                                           const CodecConfig& cfg);

// Maps 0 -> 0.0 and 1 -> 1.0 for use as model inputs.
FeatureVector BitsToFeatures(const BitString& bits);

}  // namespace ldpfl

#endif  // LDPFL_BITCODEC_H_
