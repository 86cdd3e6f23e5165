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

#include "ldpfl/federation.h"

#include <algorithm>
#include <bit>
#include <fstream>
#include <numeric>
#include <sstream>

#include "absl/strings/str_cat.h"
#include "ldpfl/internal/status_macros.h"
#include "ldpfl/random.h"
#include "nlohmann/json.hpp"

namespace ldpfl {
namespace {

constexpr std::string_view kParamsMagic = "LDPFL1";

void PutU32(std::string& out, uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

void PutF64(std::string& out, double v) {
  const uint64_t bits = std::bit_cast<uint64_t>(v);
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((bits >> (8 * i)) & 0xff));
}

class Reader {
 public:
  explicit Reader(std::string_view bytes) : bytes_(bytes) {}

  absl::StatusOr<uint64_t> Uint(int width) {
    if (offset_ + width > bytes_.size()) return Truncated();
    uint64_t v = 0;
    for (int i = 0; i < width; ++i) {
      v |= uint64_t{static_cast<uint8_t>(bytes_[offset_ + i])} << (8 * i);
    }
    offset_ += width;
    return v;
  }
  absl::StatusOr<double> F64() {
    LDPFL_ASSIGN_OR_RETURN(const uint64_t bits, Uint(8));
    return std::bit_cast<double>(bits);
  }
  absl::StatusOr<std::string_view> Bytes(size_t n) {
    if (offset_ + n > bytes_.size()) return Truncated();
    std::string_view out = bytes_.substr(offset_, n);
    offset_ += n;
    return out;
  }
  size_t offset() const { return offset_; }
  bool done() const { return offset_ == bytes_.size(); }

 private:
  absl::Status Truncated() const {
    return absl::DataLossError(
        absl::StrCat("params payload truncated at byte ", offset_));
  }
  std::string_view bytes_;
  size_t offset_ = 0;
};

absl::Status WithClient(int id, const absl::Status& status) {
  return absl::Status(status.code(),
                      absl::StrCat("client ", id, ": ", status.message()));
}

}  // namespace

absl::Status FederationConfig::Validate() const {
  if (num_clients < 1 || clients_per_round < 1 ||
      clients_per_round > num_clients) {
    return absl::InvalidArgumentError(absl::StrCat(
        "need 1 <= k <= N, got k=", clients_per_round, " N=", num_clients));
  }
  if (local_epochs < 1 || rounds < 1) {
    return absl::InvalidArgumentError(absl::StrCat(
        "local epochs and rounds must be >= 1, got el=", local_epochs,
        " E=", rounds));
  }
  return optimizer.Validate();
}

std::string SerializeParams(const ModelParams& params) {
  std::string out(kParamsMagic);
  const LayerLayout layout = params.layout();
  PutU32(out, static_cast<uint32_t>(layout.sizes.size()));
  for (int s : layout.sizes) PutU32(out, static_cast<uint32_t>(s));
  for (Activation a : layout.activations) out.push_back(static_cast<char>(a));
  for (const DenseLayer& layer : params.layers) {
    for (double w : layer.weights) PutF64(out, w);
    for (double b : layer.bias) PutF64(out, b);
  }
  return out;
}

absl::StatusOr<ModelParams> DeserializeParams(std::string_view bytes) {
  Reader reader(bytes);
  LDPFL_ASSIGN_OR_RETURN(const std::string_view magic,
                         reader.Bytes(kParamsMagic.size()));
  if (magic != kParamsMagic) {
    return absl::DataLossError("params payload does not start with LDPFL1");
  }
  LDPFL_ASSIGN_OR_RETURN(const uint64_t count, reader.Uint(4));
  if (count < 2 || count > 1024) {
    return absl::DataLossError(absl::StrCat("implausible layer count ", count));
  }
  LayerLayout layout;
  for (uint64_t i = 0; i < count; ++i) {
    LDPFL_ASSIGN_OR_RETURN(const uint64_t size, reader.Uint(4));
    layout.sizes.push_back(static_cast<int>(size));
  }
  for (uint64_t i = 0; i + 1 < count; ++i) {
    LDPFL_ASSIGN_OR_RETURN(const uint64_t code, reader.Uint(1));
    if (code > static_cast<uint64_t>(Activation::kSoftmax)) {
      return absl::DataLossError(absl::StrCat("unknown activation code ", code,
                                              " at byte ", reader.offset() - 1));
    }
    layout.activations.push_back(static_cast<Activation>(code));
  }
  if (auto s = layout.Validate(); !s.ok()) {
    return absl::DataLossError(absl::StrCat("bad layout: ", s.message()));
  }
  ModelParams params;
  for (size_t l = 0; l < layout.num_layers(); ++l) {
    DenseLayer layer;
    layer.inputs = layout.sizes[l];
    layer.outputs = layout.sizes[l + 1];
    layer.activation = layout.activations[l];
    layer.weights.resize(static_cast<size_t>(layer.inputs) * layer.outputs);
    layer.bias.resize(layer.outputs);
    for (double& w : layer.weights) {
      LDPFL_ASSIGN_OR_RETURN(w, reader.F64());
    }
    for (double& b : layer.bias) {
      LDPFL_ASSIGN_OR_RETURN(b, reader.F64());
    }
    params.layers.push_back(std::move(layer));
  }
  if (!reader.done()) {
    return absl::DataLossError(
        absl::StrCat("trailing bytes after params at byte ", reader.offset()));
  }
  return params;
}

absl::Status WriteCheckpoint(const std::string& path, const ModelParams& params) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) return absl::NotFoundError(absl::StrCat("cannot write ", path));
  const std::string bytes = SerializeParams(params);
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) return absl::DataLossError(absl::StrCat("short write to ", path));
  return absl::OkStatus();
}

absl::StatusOr<ModelParams> ReadCheckpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return absl::NotFoundError(absl::StrCat("cannot open ", path));
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return DeserializeParams(buffer.str());
}

std::string RoundRecordToJson(const RoundRecord& record) {
  nlohmann::ordered_json j;
  j["round"] = record.round;
  j["selected"] = record.selected;
  nlohmann::ordered_json clients = nlohmann::ordered_json::array();
  for (const ClientMetrics& c : record.clients) {
    clients.push_back({{"id", c.id}, {"loss", c.train_loss}, {"accuracy", c.train_accuracy}});
  }
  j["clients"] = std::move(clients);
  j["global_loss"] = record.global_loss;
  j["global_accuracy"] = record.global_accuracy;
  return j.dump();
}

absl::StatusOr<RoundRecord> RoundRecordFromJson(std::string_view line) {
  const nlohmann::json j = nlohmann::json::parse(line, nullptr, false);
  if (j.is_discarded() || !j.is_object()) {
    return absl::DataLossError("metrics line is not a JSON object");
  }
  try {
    RoundRecord record;
    record.round = j.at("round").get<int>();
    record.selected = j.at("selected").get<std::vector<int>>();
    for (const auto& c : j.at("clients")) {
      record.clients.push_back({c.at("id").get<int>(), c.at("loss").get<double>(),
                                c.at("accuracy").get<double>()});
    }
    record.global_loss = j.at("global_loss").get<double>();
    record.global_accuracy = j.at("global_accuracy").get<double>();
    return record;
  } catch (const nlohmann::json::exception& e) {
    return absl::DataLossError(absl::StrCat("malformed metrics record: ", e.what()));
  }
}

absl::StatusOr<ModelParams> FederatedAverage(
    std::span<const ModelParams> updates) {
  if (updates.empty()) {
    return absl::InvalidArgumentError("cannot average zero updates");
  }
  for (size_t u = 1; u < updates.size(); ++u) {
    if (!updates[u].SameShape(updates[0])) {
      return absl::FailedPreconditionError(
          absl::StrCat("update ", u, " has a different shape from update 0"));
    }
  }
  const double count = static_cast<double>(updates.size());
  std::vector<double> column(updates.size());
  auto mean_of = [&](auto&& value_at) {
    for (size_t u = 0; u < updates.size(); ++u) column[u] = value_at(updates[u]);
    std::sort(column.begin(), column.end());
    double total = 0.0;
    for (double v : column) total += v;
    return total / count;
  };

  ModelParams out = updates[0];
  for (size_t l = 0; l < out.layers.size(); ++l) {
    DenseLayer& layer = out.layers[l];
    for (size_t i = 0; i < layer.weights.size(); ++i) {
      layer.weights[i] = mean_of([&](const ModelParams& p) { return p.layers[l].weights[i]; });
    }
    for (size_t i = 0; i < layer.bias.size(); ++i) {
      layer.bias[i] = mean_of([&](const ModelParams& p) { return p.layers[l].bias[i]; });
    }
  }
  return out;
}

absl::StatusOr<std::vector<int>> SelectClients(int num_clients, int k,
                                               int round, uint64_t seed) {
  if (num_clients < 1 || k < 1 || k > num_clients) {
    return absl::InvalidArgumentError(absl::StrCat(
        "cannot select ", k, " of ", num_clients, " clients"));
  }
  std::vector<int> ids(num_clients);
  std::iota(ids.begin(), ids.end(), 0);
  Engine engine(DeriveSeed(DeriveSeed(seed, streams::kSelect),
                           static_cast<uint64_t>(round)));
  std::shuffle(ids.begin(), ids.end(), engine);
  ids.resize(k);
  std::sort(ids.begin(), ids.end());
  return ids;
}

Client::Client(int id, Dataset train, Dataset test, uint64_t seed)
    : id_(id), seed_(seed), train_(std::move(train)), test_(std::move(test)) {}

absl::Status Client::Receive(std::string_view payload) {
  LDPFL_ASSIGN_OR_RETURN(ModelParams params, DeserializeParams(payload));
  params_ = std::move(params);
  return absl::OkStatus();
}

absl::StatusOr<std::string> Client::TrainLocal(const FederationConfig& cfg,
                                               int round,
                                               ClientMetrics* metrics) {
  LDPFL_ASSIGN_OR_RETURN(
      ModelParams trained,
      Train(params_, train_, cfg.optimizer, cfg.local_epochs,
            DeriveSeed(seed_, static_cast<uint64_t>(round))));
  params_ = std::move(trained);
  if (metrics != nullptr) {
    metrics->id = id_;
    if (!train_.empty()) {
      LDPFL_ASSIGN_OR_RETURN(const EvalMetrics m, Evaluate(params_, train_));
      metrics->train_loss = m.loss;
      metrics->train_accuracy = m.accuracy;
    }
  }
  return SerializeParams(params_);
}

absl::StatusOr<EvalMetrics> Client::EvaluateLocal() const {
  return Evaluate(params_, test_);
}

absl::Status Server::Aggregate(std::span<const std::string> payloads) {
  std::vector<ModelParams> updates;
  updates.reserve(payloads.size());
  for (const std::string& payload : payloads) {
    LDPFL_ASSIGN_OR_RETURN(ModelParams update, DeserializeParams(payload));
    updates.push_back(std::move(update));
  }
  LDPFL_ASSIGN_OR_RETURN(ModelParams averaged, FederatedAverage(updates));
  if (!averaged.SameShape(global_)) {
    return absl::FailedPreconditionError("aggregated model changed shape");
  }
  global_ = std::move(averaged);
  return absl::OkStatus();
}

absl::StatusOr<RoundRecord> RunRound(std::span<Client> clients, Server& server,
                                     const FederationConfig& cfg, int round) {
  if (cfg.local_epochs < 0) {
    return absl::InvalidArgumentError("local epochs must be >= 0");
  }
  LDPFL_ASSIGN_OR_RETURN(
      const std::vector<int> selected,
      SelectClients(static_cast<int>(clients.size()), cfg.clients_per_round,
                    round, cfg.seed));
  RoundRecord record;
  record.round = round;
  record.selected = selected;

  const std::string broadcast = server.Broadcast();
  std::vector<std::string> uploads;
  for (int id : selected) {
    Client& client = clients[id];
    if (auto s = client.Receive(broadcast); !s.ok()) return WithClient(client.id(), s);
    ClientMetrics metrics;
    auto upload = client.TrainLocal(cfg, round, &metrics);
    if (!upload.ok()) return WithClient(client.id(), upload.status());
    uploads.push_back(*std::move(upload));
    record.clients.push_back(metrics);
  }
  LDPFL_RETURN_IF_ERROR(server.Aggregate(uploads));

  const std::string update = server.Broadcast();
  double correct = 0.0;
  double loss = 0.0;
  size_t rows = 0;
  for (Client& client : clients) {
    if (auto s = client.Receive(update); !s.ok()) return WithClient(client.id(), s);
    if (client.test_size() == 0) continue;
    auto metrics = client.EvaluateLocal();
    if (!metrics.ok()) return WithClient(client.id(), metrics.status());
    const double n = static_cast<double>(client.test_size());
    correct += metrics->accuracy * n;
    loss += metrics->loss * n;
    rows += client.test_size();
  }
  if (rows > 0) {
    record.global_accuracy = correct / static_cast<double>(rows);
    record.global_loss = loss / static_cast<double>(rows);
  }
  return record;
}

absl::StatusOr<RoundOutcome> RunRound(std::span<Client> clients,
                                      const ModelParams& global,
                                      const FederationConfig& cfg, int round) {
  Server server(global);
  LDPFL_ASSIGN_OR_RETURN(RoundRecord record, RunRound(clients, server, cfg, round));
  return RoundOutcome{server.global(), std::move(record)};
}

uint64_t ClientSeed(uint64_t seed, int id) {
  return DeriveSeed(DeriveSeed(seed, streams::kClient), static_cast<uint64_t>(id));
}

SimulationResult RunSimulation(
    const FederationConfig& cfg, const LayerLayout& layout,
    std::vector<ClientData> datasets,
    const std::function<void(const RoundRecord&)>& on_round) {
  SimulationResult result;
  if (auto s = cfg.Validate(); !s.ok()) {
    result.status = s;
    return result;
  }
  if (datasets.size() != static_cast<size_t>(cfg.num_clients)) {
    result.status = absl::InvalidArgumentError(absl::StrCat(
        "config declares ", cfg.num_clients, " clients but ", datasets.size(),
        " datasets were given"));
    return result;
  }
  auto initial = InitParams(layout, cfg.seed);
  if (!initial.ok()) {
    result.status = initial.status();
    return result;
  }
  Server server(*std::move(initial));

  std::vector<Client> clients;
  clients.reserve(datasets.size());
  for (size_t i = 0; i < datasets.size(); ++i) {
    const int id = static_cast<int>(i);
    clients.emplace_back(id, std::move(datasets[i].train), std::move(datasets[i].test),
                         ClientSeed(cfg.seed, id));
  }
  // Every client starts from the same initial model M0.
  const std::string initial_payload = server.Broadcast();
  for (Client& client : clients) {
    if (auto s = client.Receive(initial_payload); !s.ok()) {
      result.status = WithClient(client.id(), s);
      return result;
    }
  }

  for (int round = 1; round <= cfg.rounds; ++round) {
    auto record = RunRound(clients, server, cfg, round);
    if (!record.ok()) {
      result.status = absl::Status(
          record.status().code(),
          absl::StrCat("round ", round, ": ", record.status().message()));
      break;
    }
    if (on_round) on_round(*record);
    result.history.push_back(*std::move(record));
  }
  result.global = server.global();
  return result;
}

}  // namespace ldpfl
