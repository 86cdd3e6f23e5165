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

#include "ldpfl/pipeline.h"

#include <limits>
#include <string_view>

#include "absl/strings/str_cat.h"
#include "ldpfl/internal/status_macros.h"
#include "ldpfl/random.h"

namespace ldpfl {
namespace {

absl::Status StageError(int client, const char* stage,
                        const absl::Status& status) {
  return absl::Status(status.code(), absl::StrCat("client ", client, ", stage ",
                                                  stage, ": ", status.message()));
}

// Trains until the training loss stops improving or the epoch budget runs
// out.
absl::StatusOr<ModelParams> TrainExtractor(const Dataset& train,
                                           const PipelineConfig& cfg,
                                           int num_classes, uint64_t seed) {
  std::vector<int> sizes = {static_cast<int>(train.dims)};
  sizes.insert(sizes.end(), cfg.extractor_hidden.begin(), cfg.extractor_hidden.end());
  sizes.push_back(num_classes);
  LDPFL_ASSIGN_OR_RETURN(ModelParams params,
                         InitParams(LayerLayout::Classifier(sizes), seed));
  double best = std::numeric_limits<double>::infinity();
  int stalled = 0;
  for (int epoch = 0; epoch < cfg.extractor_max_epochs; ++epoch) {
    LDPFL_ASSIGN_OR_RETURN(
        params, Train(params, train, cfg.extractor_optimizer, 1,
                      DeriveSeed(seed, static_cast<uint64_t>(epoch))));
    LDPFL_ASSIGN_OR_RETURN(const EvalMetrics m, Evaluate(params, train));
    if (m.loss < best * (1.0 - 1e-4)) {
      best = m.loss;
      stalled = 0;
    } else if (++stalled >= cfg.extractor_patience) {
      break;
    }
  }
  return params;
}

}  // namespace

absl::Status PipelineConfig::Validate() const {
  if (randomize) {
    RandomizerSpec spec{mechanism, epsilon, alpha, 4};
    LDPFL_RETURN_IF_ERROR(spec.Validate());
  }
  if (extractor_hidden.empty()) {
    return absl::InvalidArgumentError("extractor needs at least one hidden layer");
  }
  if (extractor_tap < 0 || extractor_tap > static_cast<int>(extractor_hidden.size())) {
    return absl::InvalidArgumentError(absl::StrCat(
        "tap layer ", extractor_tap, " outside [1, ", extractor_hidden.size(), "]"));
  }
  if (extractor_max_epochs < 1 || extractor_patience < 1) {
    return absl::InvalidArgumentError("extractor epochs and patience must be >= 1");
  }
  LDPFL_RETURN_IF_ERROR(extractor_optimizer.Validate());
  if (partition == PartitionMode::kNonIid && !(sparsity > 0.0 && sparsity <= 1.0)) {
    return absl::InvalidArgumentError(
        absl::StrCat("sparsity must lie in (0, 1], got ", sparsity));
  }
  return federation.Validate();
}

int PipelineConfig::TapLayer() const {
  return extractor_tap == 0 ? static_cast<int>(extractor_hidden.size()) : extractor_tap;
}

int PadValuesFor(Mechanism mechanism, bool randomize, int feature_count,
                 int bits_per_value) {
  if (!randomize) return 0;
  int modulus = 1;
  if (mechanism == Mechanism::kTheorem1) modulus = 2;
  if (mechanism == Mechanism::kTheorem2) modulus = 4;
  int pad = 0;
  while (((feature_count + pad) * bits_per_value) % modulus != 0) ++pad;
  return pad;
}

absl::StatusOr<PreparedSet> PrepareClients(const Dataset& ds,
                                           const PipelineConfig& cfg,
                                           bool keep_raw_features) {
  LDPFL_RETURN_IF_ERROR(cfg.Validate());
  LDPFL_RETURN_IF_ERROR(ds.Validate());
  const int num_clients = cfg.federation.num_clients;

  absl::StatusOr<PartitionPlan> plan =
      cfg.partition == PartitionMode::kEqual
          ? PartitionEqual(ds, num_clients, cfg.seed)
          : PartitionNonIid(ds, num_clients, cfg.sparsity, cfg.seed);
  if (!plan.ok()) return plan.status();

  const int r = cfg.FeatureCount();
  const int l = cfg.codec.bits_per_value();
  const int pad = PadValuesFor(cfg.mechanism, cfg.randomize, r, l);
  const int tap = cfg.TapLayer();

  PreparedSet out;
  LDPFL_ASSIGN_OR_RETURN(out.sensitivity, StringSensitivity(r + pad, cfg.codec));
  RandomizerSpec spec{cfg.mechanism, cfg.epsilon, cfg.alpha, out.sensitivity.delta_f};
  std::vector<PrivacyBudget> budgets;

  for (int id = 0; id < num_clients; ++id) {
    const Dataset local = Subset(ds, plan->clients[id]);
    const auto [train_idx, test_idx] =
        LocalSplit(local.size(), kLocalTrainFraction, cfg.seed, id);
    const Dataset train = Subset(local, train_idx);

    const uint64_t extractor_seed =
        DeriveSeed(DeriveSeed(cfg.seed, streams::kExtractor), static_cast<uint64_t>(id));
    auto extractor = TrainExtractor(train, cfg, ds.num_classes, extractor_seed);
    if (!extractor.ok()) return StageError(id, "extractor", extractor.status());

    PreparedClient client;
    client.id = id;
    client.feature_count = r;
    client.bits_per_value = l;
    client.pad_values = pad;
    client.num_classes = ds.num_classes;
    client.labels = local.labels;

    Dataset raw;
    raw.dims = static_cast<size_t>(r);
    raw.num_classes = ds.num_classes;
    std::vector<BitString> encoded;
    encoded.reserve(local.size());
    for (size_t row = 0; row < local.size(); ++row) {
      auto features = ExtractFeatures(*extractor, local.Row(row), tap);
      if (!features.ok()) return StageError(id, "flatten", features.status());
      if (keep_raw_features) raw.AddRow(*features, local.labels[row]);
      features->resize(static_cast<size_t>(r + pad), 0.0);
      auto bits = EncodeVector(*features, cfg.codec);
      if (!bits.ok()) return StageError(id, "encode", bits.status());
      encoded.push_back(*std::move(bits));
    }

    if (cfg.randomize) {
      auto randomized = RandomizeDataset(
          encoded, spec,
          DeriveSeed(DeriveSeed(cfg.seed, streams::kRandomize), static_cast<uint64_t>(id)));
      if (!randomized.ok()) return StageError(id, "randomize", randomized.status());
      client.rows = *std::move(randomized);
      budgets.push_back({cfg.epsilon, absl::StrCat("client ", id)});
    } else {
      client.rows = std::move(encoded);
    }
    out.clients.push_back(std::move(client));
    if (keep_raw_features) out.raw_features.push_back(std::move(raw));
  }

  if (budgets.empty()) {
    out.protocol_budget = {std::numeric_limits<double>::infinity(), "none"};
  } else {
    LDPFL_ASSIGN_OR_RETURN(out.protocol_budget, ComposeParallel(budgets));
  }
  return out;
}

absl::StatusOr<ClientData> ToClientData(const PreparedClient& client,
                                        uint64_t seed) {
  if (client.rows.size() != client.labels.size()) {
    return absl::FailedPreconditionError(
        absl::StrCat("client ", client.id, " has ", client.rows.size(),
                     " rows but ", client.labels.size(), " labels"));
  }
  Dataset all;
  all.dims = client.bit_length();
  all.num_classes = client.num_classes;
  all.values.reserve(client.rows.size() * all.dims);
  for (size_t i = 0; i < client.rows.size(); ++i) {
    if (client.rows[i].size() != all.dims) {
      return absl::FailedPreconditionError(
          absl::StrCat("client ", client.id, " row ", i, " has ",
                       client.rows[i].size(), " bits, expected ", all.dims));
    }
    all.AddRow(BitsToFeatures(client.rows[i]), client.labels[i]);
  }
  LDPFL_RETURN_IF_ERROR(all.Validate());
  const auto [train_idx, test_idx] =
      LocalSplit(all.size(), kLocalTrainFraction, seed, client.id);
  return ClientData{Subset(all, train_idx), Subset(all, test_idx)};
}

SimulationResult SimulatePrepared(
    const std::vector<PreparedClient>& clients, const PipelineConfig& cfg,
    const std::function<void(const RoundRecord&)>& on_round) {
  SimulationResult result;
  if (clients.empty()) {
    result.status = absl::InvalidArgumentError("no prepared clients");
    return result;
  }
  const size_t bits = clients.front().bit_length();
  const int classes = clients.front().num_classes;
  std::vector<ClientData> datasets;
  for (const PreparedClient& client : clients) {
    if (client.bit_length() != bits || client.num_classes != classes) {
      result.status = absl::FailedPreconditionError(absl::StrCat(
          "client ", client.id, " has shape (", client.bit_length(), " bits, ",
          client.num_classes, " classes), expected (", bits, ", ", classes, ")"));
      return result;
    }
    auto data = ToClientData(client, cfg.seed);
    if (!data.ok()) {
      result.status = data.status();
      return result;
    }
    datasets.push_back(*std::move(data));
  }
  std::vector<int> sizes = {static_cast<int>(bits)};
  sizes.insert(sizes.end(), cfg.model_hidden.begin(), cfg.model_hidden.end());
  sizes.push_back(classes);

  FederationConfig fed = cfg.federation;
  fed.seed = cfg.seed;
  fed.num_clients = static_cast<int>(clients.size());
  return RunSimulation(fed, LayerLayout::Classifier(sizes), std::move(datasets), on_round);
}

}  // namespace ldpfl
