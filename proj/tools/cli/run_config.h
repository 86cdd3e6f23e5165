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

#ifndef LDPFL_TOOLS_CLI_RUN_CONFIG_H_
#define LDPFL_TOOLS_CLI_RUN_CONFIG_H_

#include <cstdint>
#include <optional>
#include <string>

#include "absl/status/statusor.h"
#include "ldpfl/data.h"
#include "ldpfl/pipeline.h"

namespace ldpfl::cli {

struct DatasetSource {
  enum class Kind { kSynthetic, kCsv, kIdx };
  Kind kind = Kind::kSynthetic;
  std::string path;  // csv file, or IDX images
  std::string labels_path;
  std::string label_column = "label";
  // Synthetic blobs.
  int classes = 10;
  int per_class = 200;
  int dims = 16;
  double spread = 1.0;
  // Blob seed; the master seed when unset.
  std::optional<uint64_t> seed;
};

// One experiment manifest. The JSON layout mirrors these fields; see the
// README for an annotated example.
struct RunConfig {
  DatasetSource dataset;
  PipelineConfig pipeline;
  // Set when the manifest pins k; otherwise k follows N.
  std::optional<int> clients_per_round;
  std::string out_dir = "ldpfl_out";
};

// Command-line values that take precedence over the manifest.
struct Overrides {
  std::optional<uint64_t> seed;
  std::optional<double> epsilon;
  std::optional<double> alpha;
  std::optional<std::string> mechanism;
  std::optional<int> clients;
  std::optional<int> rounds;
  std::optional<std::string> out_dir;
};

// Parses a manifest. Unknown keys are rejected so that typos do not silently
// fall back to defaults.
absl::StatusOr<RunConfig> ParseRunConfig(const std::string& json_text);
absl::StatusOr<RunConfig> LoadRunConfig(const std::string& path);

// Applies `o`, then checks the result, including that referenced dataset
// files exist.
absl::StatusOr<RunConfig> Finalize(RunConfig cfg, const Overrides& o);

// Accepts the randomizer names plus "NONE" for the non-private baseline.
absl::Status SetMechanism(PipelineConfig& cfg, std::string_view name);
std::string MechanismLabel(const PipelineConfig& cfg);

absl::StatusOr<Dataset> LoadDataset(const RunConfig& cfg);

std::string PreparedDir(const RunConfig& cfg);
std::string ClientFilePath(const RunConfig& cfg, int client);
std::string MetricsPath(const RunConfig& cfg);
std::string CheckpointPath(const RunConfig& cfg);

}  // namespace ldpfl::cli

#endif  // LDPFL_TOOLS_CLI_RUN_CONFIG_H_
