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

#ifndef LDPFL_TOOLS_CLI_COMMANDS_H_
#define LDPFL_TOOLS_CLI_COMMANDS_H_

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "absl/status/status.h"
#include "cli/run_config.h"

namespace ldpfl::cli {

enum ExitCode : int {
  kExitOk = 0,
  kExitUsage = 1,
  kExitData = 2,
  kExitVerify = 3,
};

// Config and usage problems map to 1, everything raised while reading or
// processing data maps to 2.
int ExitCodeFor(const absl::Status& status);

// Part I: writes one LDPFLD file per client under <out>/prepared. With
// `debug` the tapped features are also written as CSV under <out>/debug.
int CmdPrepare(const RunConfig& cfg, bool debug, std::ostream& out, std::ostream& err);

// Part II: reads the prepared files, streams <out>/metrics.jsonl and writes
// the final model to <out>/model.ldpfl1.
int CmdSimulate(const RunConfig& cfg, std::ostream& out, std::ostream& err);

struct VerifyOptions {
  // Restricts the checks to one mechanism; all of them when unset.
  std::optional<std::string> mechanism;
  std::optional<double> epsilon;
  std::optional<double> alpha;
  uint64_t seed = 1;
  int64_t trials = 1000000;
};

int CmdVerify(const VerifyOptions& opts, std::ostream& out, std::ostream& err);

// Writes <out>/<run>_convergence.csv per input and <out>/comparison.csv, or
// prints everything when `out_dir` is unset.
int CmdReport(const std::vector<std::string>& metrics_files,
              const std::optional<std::string>& out_dir, std::ostream& out,
              std::ostream& err);

}  // namespace ldpfl::cli

#endif  // LDPFL_TOOLS_CLI_COMMANDS_H_
