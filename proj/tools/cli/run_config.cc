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

#include "cli/run_config.h"

#include <cctype>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "absl/strings/str_cat.h"
#include "absl/strings/str_format.h"
#include "ldpfl/internal/status_macros.h"
#include "nlohmann/json.hpp"

namespace ldpfl::cli {
namespace {

using nlohmann::json;

absl::Status CheckKeys(const json& obj, const std::string& where,
                       const std::set<std::string>& allowed) {
  if (!obj.is_object()) {
    return absl::InvalidArgumentError(absl::StrCat(where, " must be an object"));
  }
  for (const auto& item : obj.items()) {
    if (!allowed.count(item.key())) {
      return absl::InvalidArgumentError(
          absl::StrCat("unknown key '", item.key(), "' in ", where));
    }
  }
  return absl::OkStatus();
}

template <typename T>
void Read(const json& obj, const char* key, T& out) {
  if (obj.contains(key)) out = obj.at(key).get<T>();
}

absl::Status ParseDataset(const json& j, DatasetSource& ds) {
  LDPFL_RETURN_IF_ERROR(CheckKeys(j, "dataset",
                                  {"type", "path", "images", "labels", "label_column",
                                   "classes", "per_class", "dims", "spread", "seed"}));
  const std::string type = j.value("type", "synthetic");
  if (type == "synthetic") {
    ds.kind = DatasetSource::Kind::kSynthetic;
    Read(j, "classes", ds.classes);
    Read(j, "per_class", ds.per_class);
    Read(j, "dims", ds.dims);
    Read(j, "spread", ds.spread);
    if (j.contains("seed")) ds.seed = j.at("seed").get<uint64_t>();
  } else if (type == "csv") {
    ds.kind = DatasetSource::Kind::kCsv;
    Read(j, "path", ds.path);
    Read(j, "label_column", ds.label_column);
  } else if (type == "idx") {
    ds.kind = DatasetSource::Kind::kIdx;
    Read(j, "images", ds.path);
    Read(j, "labels", ds.labels_path);
  } else {
    return absl::InvalidArgumentError(absl::StrCat("unknown dataset type '", type, "'"));
  }
  return absl::OkStatus();
}

absl::StatusOr<OptimizerConfig::Kind> ParseOptimizer(const std::string& name) {
  if (name == "adam") return OptimizerConfig::Kind::kAdam;
  if (name == "sgd") return OptimizerConfig::Kind::kSgd;
  return absl::InvalidArgumentError(absl::StrCat("unknown optimizer '", name, "'"));
}

absl::Status ParseOptimizerFields(const json& j, OptimizerConfig& opt) {
  if (j.contains("optimizer")) {
    LDPFL_ASSIGN_OR_RETURN(opt.kind, ParseOptimizer(j.at("optimizer").get<std::string>()));
  }
  Read(j, "learning_rate", opt.learning_rate);
  Read(j, "batch_size", opt.batch_size);
  return absl::OkStatus();
}

absl::Status ParseInto(const json& root, RunConfig& cfg) {
  LDPFL_RETURN_IF_ERROR(CheckKeys(root, "config",
                                  {"dataset", "codec", "randomizer", "partition",
                                   "extractor", "model", "federation", "seed", "out"}));
  PipelineConfig& p = cfg.pipeline;
  if (root.contains("dataset")) LDPFL_RETURN_IF_ERROR(ParseDataset(root["dataset"], cfg.dataset));
  if (root.contains("codec")) {
    const json& j = root["codec"];
    LDPFL_RETURN_IF_ERROR(CheckKeys(j, "codec", {"m", "n"}));
    int m = p.codec.integer_bits();
    int n = p.codec.fraction_bits();
    Read(j, "m", m);
    Read(j, "n", n);
    LDPFL_ASSIGN_OR_RETURN(p.codec, CodecConfig::Create(m, n));
  }
  if (root.contains("randomizer")) {
    const json& j = root["randomizer"];
    LDPFL_RETURN_IF_ERROR(CheckKeys(j, "randomizer", {"mechanism", "epsilon", "alpha"}));
    if (j.contains("mechanism")) {
      LDPFL_RETURN_IF_ERROR(SetMechanism(p, j["mechanism"].get<std::string>()));
    }
    Read(j, "epsilon", p.epsilon);
    Read(j, "alpha", p.alpha);
  }
  if (root.contains("partition")) {
    const json& j = root["partition"];
    LDPFL_RETURN_IF_ERROR(CheckKeys(j, "partition", {"mode", "sparsity"}));
    const std::string mode = j.value("mode", "equal");
    if (mode == "equal") {
      p.partition = PartitionMode::kEqual;
    } else if (mode == "noniid") {
      p.partition = PartitionMode::kNonIid;
    } else {
      return absl::InvalidArgumentError(absl::StrCat("unknown partition mode '", mode, "'"));
    }
    Read(j, "sparsity", p.sparsity);
  }
  if (root.contains("extractor")) {
    const json& j = root["extractor"];
    LDPFL_RETURN_IF_ERROR(CheckKeys(j, "extractor",
                                    {"hidden", "tap", "max_epochs", "patience", "optimizer",
                                     "learning_rate", "batch_size"}));
    Read(j, "hidden", p.extractor_hidden);
    Read(j, "tap", p.extractor_tap);
    Read(j, "max_epochs", p.extractor_max_epochs);
    Read(j, "patience", p.extractor_patience);
    LDPFL_RETURN_IF_ERROR(ParseOptimizerFields(j, p.extractor_optimizer));
  }
  if (root.contains("model")) {
    const json& j = root["model"];
    LDPFL_RETURN_IF_ERROR(CheckKeys(j, "model", {"hidden"}));
    Read(j, "hidden", p.model_hidden);
  }
  if (root.contains("federation")) {
    const json& j = root["federation"];
    LDPFL_RETURN_IF_ERROR(CheckKeys(j, "federation",
                                    {"clients", "clients_per_round", "local_epochs", "rounds",
                                     "optimizer", "learning_rate", "batch_size"}));
    Read(j, "clients", p.federation.num_clients);
    if (j.contains("clients_per_round")) {
      cfg.clients_per_round = j["clients_per_round"].get<int>();
    }
    Read(j, "local_epochs", p.federation.local_epochs);
    Read(j, "rounds", p.federation.rounds);
    LDPFL_RETURN_IF_ERROR(ParseOptimizerFields(j, p.federation.optimizer));
  }
  Read(root, "seed", p.seed);
  Read(root, "out", cfg.out_dir);
  return absl::OkStatus();
}

absl::Status RequireFile(const std::string& path, const char* what) {
  if (path.empty()) {
    return absl::InvalidArgumentError(absl::StrCat("dataset ", what, " path is not set"));
  }
  if (!std::filesystem::is_regular_file(path)) {
    return absl::NotFoundError(absl::StrCat("dataset ", what, " '", path, "' does not exist"));
  }
  return absl::OkStatus();
}

}  // namespace

absl::Status SetMechanism(PipelineConfig& cfg, std::string_view name) {
  std::string upper(name);
  for (char& c : upper) c = static_cast<char>(std::toupper(c));
  if (upper == "NONE") {
    cfg.randomize = false;
    return absl::OkStatus();
  }
  LDPFL_ASSIGN_OR_RETURN(cfg.mechanism, ParseMechanism(name));
  cfg.randomize = true;
  return absl::OkStatus();
}

std::string MechanismLabel(const PipelineConfig& cfg) {
  return cfg.randomize ? std::string(MechanismName(cfg.mechanism)) : "NONE";
}

absl::StatusOr<RunConfig> ParseRunConfig(const std::string& json_text) {
  RunConfig cfg;
  try {
    const json root = json::parse(json_text);
    LDPFL_RETURN_IF_ERROR(ParseInto(root, cfg));
  } catch (const json::exception& e) {
    return absl::InvalidArgumentError(absl::StrCat("bad config: ", e.what()));
  }
  return cfg;
}

absl::StatusOr<RunConfig> LoadRunConfig(const std::string& path) {
  std::ifstream in(path);
  if (!in) return absl::NotFoundError(absl::StrCat("cannot open config ", path));
  std::stringstream buf;
  buf << in.rdbuf();
  auto cfg = ParseRunConfig(buf.str());
  if (!cfg.ok()) {
    return absl::Status(cfg.status().code(), absl::StrCat(path, ": ", cfg.status().message()));
  }
  return cfg;
}

absl::StatusOr<RunConfig> Finalize(RunConfig cfg, const Overrides& o) {
  PipelineConfig& p = cfg.pipeline;
  if (o.seed) p.seed = *o.seed;
  if (o.epsilon) p.epsilon = *o.epsilon;
  if (o.alpha) p.alpha = *o.alpha;
  if (o.mechanism) LDPFL_RETURN_IF_ERROR(SetMechanism(p, *o.mechanism));
  if (o.clients) p.federation.num_clients = *o.clients;
  if (o.rounds) p.federation.rounds = *o.rounds;
  if (o.out_dir) cfg.out_dir = *o.out_dir;
  p.federation.clients_per_round = cfg.clients_per_round.value_or(p.federation.num_clients);
  p.federation.seed = p.seed;

  if (!(p.epsilon > 0.0)) {
    return absl::InvalidArgumentError(absl::StrCat("epsilon must be > 0, got ", p.epsilon));
  }
  LDPFL_RETURN_IF_ERROR(p.Validate());
  if (cfg.out_dir.empty()) return absl::InvalidArgumentError("output directory is empty");
  switch (cfg.dataset.kind) {
    case DatasetSource::Kind::kSynthetic:
      break;
    case DatasetSource::Kind::kCsv:
      LDPFL_RETURN_IF_ERROR(RequireFile(cfg.dataset.path, "csv"));
      break;
    case DatasetSource::Kind::kIdx:
      LDPFL_RETURN_IF_ERROR(RequireFile(cfg.dataset.path, "images"));
      LDPFL_RETURN_IF_ERROR(RequireFile(cfg.dataset.labels_path, "labels"));
      break;
  }
  return cfg;
}

absl::StatusOr<Dataset> LoadDataset(const RunConfig& cfg) {
  const DatasetSource& d = cfg.dataset;
  switch (d.kind) {
    case DatasetSource::Kind::kSynthetic:
      return SynthBlobs(d.classes, d.per_class, d.dims, d.spread,
                        d.seed.value_or(cfg.pipeline.seed));
    case DatasetSource::Kind::kCsv:
      return LoadCsv(d.path, d.label_column);
    case DatasetSource::Kind::kIdx:
      return LoadIdx(d.path, d.labels_path);
  }
  return absl::InvalidArgumentError("unknown dataset kind");
}

std::string PreparedDir(const RunConfig& cfg) {
  return (std::filesystem::path(cfg.out_dir) / "prepared").string();
}

std::string ClientFilePath(const RunConfig& cfg, int client) {
  return (std::filesystem::path(PreparedDir(cfg)) /
          absl::StrFormat("client_%03d.ldpfld", client))
      .string();
}

std::string MetricsPath(const RunConfig& cfg) {
  return (std::filesystem::path(cfg.out_dir) / "metrics.jsonl").string();
}

std::string CheckpointPath(const RunConfig& cfg) {
  return (std::filesystem::path(cfg.out_dir) / "model.ldpfl1").string();
}

}  // namespace ldpfl::cli
