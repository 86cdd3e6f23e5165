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

#ifndef LDPFL_PIPELINE_H_
#define LDPFL_PIPELINE_H_

#include <cstdint>
#include <functional>
#include <vector>

#include "absl/status/statusor.h"
#include "ldpfl/bitcodec.h"
#include "ldpfl/data.h"
#include "ldpfl/federation.h"
#include "ldpfl/neuralnet.h"
#include "ldpfl/privacy.h"
#include "ldpfl/randomizer.h"

namespace ldpfl {

// Everything the two protocol phases need besides the raw dataset.
struct PipelineConfig {
  CodecConfig codec = CodecConfig::Default();

  // When false the encoded bits are used as-is (non-private baseline).
  bool randomize = true;
  Mechanism mechanism = Mechanism::kTheorem2;
  double epsilon = 0.5;
  double alpha = 10.0;

  PartitionMode partition = PartitionMode::kEqual;
  double sparsity = 1.0;

  // Local extractor: input -> hidden... -> classes.
  std::vector<int> extractor_hidden = {64, 32};
  // 1-based hidden layer whose activations form the 1DV; 0 means the last.
  int extractor_tap = 0;
  int extractor_max_epochs = 60;
  int extractor_patience = 5;
  OptimizerConfig extractor_optimizer{OptimizerConfig::Kind::kAdam, 0.005};

  // Federated DNN: rl -> model_hidden... -> classes.
  std::vector<int> model_hidden = {64};

  // num_clients, clients_per_round, local_epochs, rounds and optimizer are
  // read from here; the seed is overwritten with `seed`.
  FederationConfig federation;

  uint64_t seed = 1;

  absl::Status Validate() const;

  // Resolved tap layer and the 1DV width r it yields.
  int TapLayer() const;
  int FeatureCount() const { return extractor_hidden[TapLayer() - 1]; }
};

// One client's randomized Part I output.
struct PreparedClient {
  int id = 0;
  int feature_count = 0;   // r
  int bits_per_value = 0;  // l
  int pad_values = 0;      // zero values appended so rl fits the mechanism
  int num_classes = 0;
  std::vector<BitString> rows;
  std::vector<int> labels;

  size_t bit_length() const {
    return static_cast<size_t>(feature_count + pad_values) * bits_per_value;
  }
};

struct PreparedSet {
  std::vector<PreparedClient> clients;
  SensitivityRecord sensitivity;  // of the (padded) merged string
  PrivacyBudget protocol_budget;  // parallel composition over clients
  // Tapped features before encoding; filled only when requested.
  std::vector<Dataset> raw_features;
};

// Zero values to append to r values of width l so that r*l meets the parity
// requirement of `mechanism` (even for THEOREM1, multiple of 4 for THEOREM2).
int PadValuesFor(Mechanism mechanism, bool randomize, int feature_count,
                 int bits_per_value);

// Part I for every client: partition, train the local extractor on the local
// training split, tap 1DVs, encode, pad and randomize. Errors name the client
// and the stage.
absl::StatusOr<PreparedSet> PrepareClients(const Dataset& ds,
                                           const PipelineConfig& cfg,
                                           bool keep_raw_features = false);

// Bits -> 0.0/1.0 rows, split into the client's deterministic local
// train/test parts.
absl::StatusOr<ClientData> ToClientData(const PreparedClient& client,
                                        uint64_t seed);

// Part II over prepared clients.
SimulationResult SimulatePrepared(
    const std::vector<PreparedClient>& clients, const PipelineConfig& cfg,
    const std::function<void(const RoundRecord&)>& on_round = {});

}  // namespace ldpfl

#endif  // LDPFL_PIPELINE_H_
