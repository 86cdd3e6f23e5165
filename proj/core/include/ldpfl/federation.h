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

#ifndef LDPFL_FEDERATION_H_
#define LDPFL_FEDERATION_H_

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "ldpfl/data.h"
#include "ldpfl/neuralnet.h"

namespace ldpfl {

struct FederationConfig {
  int num_clients = 2;        // N
  int clients_per_round = 2;  // k
  int local_epochs = 1;       // el
  int rounds = 1;             // E
  OptimizerConfig optimizer;
  uint64_t seed = 0;

  absl::Status Validate() const;
};

struct ClientMetrics {
  int id = 0;
  double train_loss = 0.0;
  double train_accuracy = 0.0;
};

struct RoundRecord {
  int round = 0;  // 1-based
  std::vector<int> selected;
  std::vector<ClientMetrics> clients;
  double global_loss = 0.0;
  double global_accuracy = 0.0;
};

// ---------------------------------------------------------------------------
// Wire and file formats.
//
// Params payload / checkpoint ("LDPFL1"), all little-endian:
//   6 bytes   magic "LDPFL1"
//   u32       number of layer sizes S
//   u32 x S   layer sizes, input first
//   u8 x S-1  activation codes (0 relu, 1 sigmoid, 2 softmax)
//   f64 ...   per dense layer: weights (outputs x inputs, row-major), bias
// ---------------------------------------------------------------------------
std::string SerializeParams(const ModelParams& params);
absl::StatusOr<ModelParams> DeserializeParams(std::string_view bytes);
absl::Status WriteCheckpoint(const std::string& path, const ModelParams& params);
absl::StatusOr<ModelParams> ReadCheckpoint(const std::string& path);

// One JSON object per round on a single line:
// {"round":1,"selected":[0,1],"clients":[{"id":0,"loss":..,"accuracy":..}],
//  "global_loss":..,"global_accuracy":..}
std::string RoundRecordToJson(const RoundRecord& record);
absl::StatusOr<RoundRecord> RoundRecordFromJson(std::string_view line);

// Elementwise mean of every weight and bias. Each coordinate is summed in
// ascending value order, so the result does not depend on update order.
absl::StatusOr<ModelParams> FederatedAverage(
    std::span<const ModelParams> updates);

// Uniform k-subset of [0, N), sorted ascending, fixed by (seed, round).
absl::StatusOr<std::vector<int>> SelectClients(int num_clients, int k,
                                               int round, uint64_t seed);

// A silo holding private randomized rows. Only serialized parameters leave
// it.
class Client {
 public:
  Client(int id, Dataset train, Dataset test, uint64_t seed);

  int id() const { return id_; }
  uint64_t seed() const { return seed_; }
  const ModelParams& params() const { return params_; }
  size_t train_size() const { return train_.size(); }
  size_t test_size() const { return test_.size(); }

  // Installs a serialized global model.
  absl::Status Receive(std::string_view payload);

  // Trains local_epochs from the resident params and returns the serialized
  // update. Metrics on the local training rows go to *metrics if non-null.
  absl::StatusOr<std::string> TrainLocal(const FederationConfig& cfg,
                                         int round, ClientMetrics* metrics);

  // Metrics of the resident params on the held-out split.
  absl::StatusOr<EvalMetrics> EvaluateLocal() const;

 private:
  int id_;
  uint64_t seed_;
  Dataset train_;
  Dataset test_;
  ModelParams params_;
};

// Holds only the global model; aggregates serialized updates.
class Server {
 public:
  explicit Server(ModelParams initial) : global_(std::move(initial)) {}

  const ModelParams& global() const { return global_; }
  std::string Broadcast() const { return SerializeParams(global_); }
  // Replaces the global model with the average of the payloads.
  absl::Status Aggregate(std::span<const std::string> payloads);

 private:
  ModelParams global_;
};

// One federation round: selected clients start from `server`'s model, train,
// upload; the server averages the v contributors; every client receives the
// result and reports held-out metrics. Client errors carry the client id.
absl::StatusOr<RoundRecord> RunRound(std::span<Client> clients,
                                     Server& server,
                                     const FederationConfig& cfg, int round);

struct RoundOutcome {
  ModelParams global;
  RoundRecord record;
};
// Convenience form starting from explicit global params.
absl::StatusOr<RoundOutcome> RunRound(std::span<Client> clients,
                                      const ModelParams& global,
                                      const FederationConfig& cfg, int round);

struct ClientData {
  Dataset train;
  Dataset test;
};

struct SimulationResult {
  // OK, or the error that stopped the run; `history` keeps finished rounds.
  absl::Status status;
  std::vector<RoundRecord> history;
  ModelParams global;
};

// Seed of client `id` under master seed `seed`.
uint64_t ClientSeed(uint64_t seed, int id);

// Whole federated phase: server initialises M0 from (layout, cfg.seed), all
// clients adopt it, then cfg.rounds rounds run in order. `on_round` (may be
// empty) sees each record as it is produced.
SimulationResult RunSimulation(
    const FederationConfig& cfg, const LayerLayout& layout,
    std::vector<ClientData> datasets,
    const std::function<void(const RoundRecord&)>& on_round = {});

}  // namespace ldpfl

#endif  // LDPFL_FEDERATION_H_
