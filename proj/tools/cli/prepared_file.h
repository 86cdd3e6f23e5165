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

#ifndef LDPFL_TOOLS_CLI_PREPARED_FILE_H_
#define LDPFL_TOOLS_CLI_PREPARED_FILE_H_

#include <string>
#include <string_view>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "ldpfl/pipeline.h"

namespace ldpfl::cli {

// Randomized client data on disk. All integers little-endian:
//   "LDPFLD" | u32 r | u32 l | u32 pad_values | u64 rows | u32 classes
// then per row ceil(bits/8) bytes of MSB-first packed bits and one label
// byte, where bits = (r + pad_values) * l.
std::string EncodePrepared(const PreparedClient& client);
absl::StatusOr<PreparedClient> DecodePrepared(std::string_view bytes, int id);

absl::Status WritePrepared(const std::string& path, const PreparedClient& client);
absl::StatusOr<PreparedClient> ReadPrepared(const std::string& path, int id);

}  // namespace ldpfl::cli

#endif  // LDPFL_TOOLS_CLI_PREPARED_FILE_H_
