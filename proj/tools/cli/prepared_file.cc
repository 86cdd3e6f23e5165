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

#include "cli/prepared_file.h"

#include <fstream>
#include <sstream>
#include <vector>

#include "absl/strings/str_cat.h"

namespace ldpfl::cli {
namespace {

constexpr std::string_view kMagic = "LDPFLD";
constexpr size_t kHeaderSize = 6 + 4 + 4 + 4 + 8 + 4;

template <typename T>
void PutLe(std::string& out, T v) {
  for (size_t i = 0; i < sizeof(T); ++i) {
    out.push_back(static_cast<char>((static_cast<uint64_t>(v) >> (8 * i)) & 0xff));
  }
}

template <typename T>
T GetLe(std::string_view bytes, size_t offset) {
  uint64_t v = 0;
  for (size_t i = 0; i < sizeof(T); ++i) {
    v |= static_cast<uint64_t>(static_cast<uint8_t>(bytes[offset + i])) << (8 * i);
  }
  return static_cast<T>(v);
}

}  // namespace

std::string EncodePrepared(const PreparedClient& client) {
  const size_t bits = client.bit_length();
  const size_t row_bytes = (bits + 7) / 8;
  std::string out(kMagic);
  PutLe<uint32_t>(out, client.feature_count);
  PutLe<uint32_t>(out, client.bits_per_value);
  PutLe<uint32_t>(out, client.pad_values);
  PutLe<uint64_t>(out, client.rows.size());
  PutLe<uint32_t>(out, client.num_classes);
  out.reserve(out.size() + client.rows.size() * (row_bytes + 1));
  std::vector<uint8_t> packed(row_bytes);
  for (size_t r = 0; r < client.rows.size(); ++r) {
    std::fill(packed.begin(), packed.end(), 0);
    const BitString& row = client.rows[r];
    for (size_t i = 0; i < bits; ++i) {
      if (row[i]) packed[i / 8] |= static_cast<uint8_t>(0x80u >> (i % 8));
    }
    out.append(packed.begin(), packed.end());
    out.push_back(static_cast<char>(client.labels[r]));
  }
  return out;
}

absl::StatusOr<PreparedClient> DecodePrepared(std::string_view bytes, int id) {
  if (bytes.size() < kHeaderSize || bytes.substr(0, kMagic.size()) != kMagic) {
    return absl::DataLossError("not an LDPFLD file (bad magic or short header)");
  }
  PreparedClient c;
  c.id = id;
  c.feature_count = static_cast<int>(GetLe<uint32_t>(bytes, 6));
  c.bits_per_value = static_cast<int>(GetLe<uint32_t>(bytes, 10));
  c.pad_values = static_cast<int>(GetLe<uint32_t>(bytes, 14));
  const uint64_t rows = GetLe<uint64_t>(bytes, 18);
  c.num_classes = static_cast<int>(GetLe<uint32_t>(bytes, 26));
  if (c.feature_count < 1 || c.bits_per_value < 1 || c.pad_values < 0 ||
      c.num_classes < 1 || c.num_classes > 256) {
    return absl::DataLossError(absl::StrCat("implausible LDPFLD header: r=", c.feature_count,
                                            " l=", c.bits_per_value, " classes=",
                                            c.num_classes));
  }
  const size_t bits = c.bit_length();
  const size_t stride = (bits + 7) / 8 + 1;
  if ((bytes.size() - kHeaderSize) / stride != rows ||
      (bytes.size() - kHeaderSize) % stride != 0) {
    return absl::DataLossError(absl::StrCat("LDPFLD body holds ", bytes.size() - kHeaderSize,
                                            " bytes, header promises ", rows, " rows of ",
                                            stride));
  }
  c.rows.reserve(rows);
  c.labels.reserve(rows);
  size_t offset = kHeaderSize;
  for (uint64_t r = 0; r < rows; ++r, offset += stride) {
    BitString row(bits);
    for (size_t i = 0; i < bits; ++i) {
      row.Set(i, (static_cast<uint8_t>(bytes[offset + i / 8]) >> (7 - i % 8)) & 1u);
    }
    const int label = static_cast<uint8_t>(bytes[offset + stride - 1]);
    if (label >= c.num_classes) {
      return absl::DataLossError(
          absl::StrCat("row ", r, " label ", label, " exceeds class count ", c.num_classes));
    }
    c.rows.push_back(std::move(row));
    c.labels.push_back(label);
  }
  return c;
}

absl::Status WritePrepared(const std::string& path, const PreparedClient& client) {
  if (client.num_classes > 256) {
    return absl::InvalidArgumentError("LDPFLD stores labels in one byte; too many classes");
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) return absl::NotFoundError(absl::StrCat("cannot write ", path));
  const std::string bytes = EncodePrepared(client);
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) return absl::DataLossError(absl::StrCat("short write to ", path));
  return absl::OkStatus();
}

absl::StatusOr<PreparedClient> ReadPrepared(const std::string& path, int id) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return absl::NotFoundError(absl::StrCat("cannot open ", path));
  std::stringstream buf;
  buf << in.rdbuf();
  auto client = DecodePrepared(buf.str(), id);
  if (!client.ok()) {
    return absl::Status(client.status().code(),
                        absl::StrCat(path, ": ", client.status().message()));
  }
  return client;
}

}  // namespace ldpfl::cli
