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

#include <filesystem>
#include <fstream>
#include <sstream>

#include "cli/commands.h"
#include "cli/prepared_file.h"
#include "cli/run_config.h"
#include "gmock/gmock.h"
#include "gtest/gtest.h"
#include "ldpfl/federation.h"

namespace ldpfl::cli {
namespace {

namespace fs = std::filesystem;
using ::testing::HasSubstr;

std::string Slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

std::string TempDir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("ldpfl_cli_test_" + name);
  fs::remove_all(dir);
  return dir.string();
}

constexpr const char* kSmall = R"({
  "dataset": {"type": "synthetic", "classes": 3, "per_class": 30, "dims": 4, "spread": 0.5},
  "extractor": {"hidden": [8, 6], "max_epochs": 10},
  "model": {"hidden": [8]},
  "federation": {"clients": 2, "rounds": 2, "learning_rate": 0.01},
  "seed": 3
})";

RunConfig SmallConfig(const std::string& out, Overrides o = {}) {
  o.out_dir = out;
  return *Finalize(*ParseRunConfig(kSmall), o);
}

TEST(RunConfigTest, DefaultsAndFields) {
  const RunConfig cfg = *ParseRunConfig(kSmall);
  EXPECT_EQ(cfg.dataset.kind, DatasetSource::Kind::kSynthetic);
  EXPECT_EQ(cfg.dataset.classes, 3);
  EXPECT_EQ(cfg.pipeline.extractor_hidden, (std::vector<int>{8, 6}));
  EXPECT_EQ(cfg.pipeline.federation.rounds, 2);
  EXPECT_EQ(cfg.pipeline.seed, 3u);
  EXPECT_EQ(cfg.pipeline.mechanism, Mechanism::kTheorem2);
  EXPECT_DOUBLE_EQ(cfg.pipeline.epsilon, 0.5);
  EXPECT_EQ(cfg.pipeline.codec, CodecConfig::Default());
}

TEST(RunConfigTest, FlagsOverrideManifest) {
  Overrides o;
  o.seed = 9;
  o.epsilon = 1.5;
  o.alpha = 4;
  o.mechanism = "none";
  o.clients = 3;
  o.rounds = 7;
  const RunConfig cfg = SmallConfig("x", o);
  EXPECT_EQ(cfg.pipeline.seed, 9u);
  EXPECT_EQ(cfg.pipeline.federation.seed, 9u);
  EXPECT_DOUBLE_EQ(cfg.pipeline.epsilon, 1.5);
  EXPECT_DOUBLE_EQ(cfg.pipeline.alpha, 4);
  EXPECT_FALSE(cfg.pipeline.randomize);
  EXPECT_EQ(cfg.pipeline.federation.num_clients, 3);
  EXPECT_EQ(cfg.pipeline.federation.clients_per_round, 3);
  EXPECT_EQ(cfg.pipeline.federation.rounds, 7);
  EXPECT_EQ(MechanismLabel(cfg.pipeline), "NONE");
}

TEST(RunConfigTest, RejectsBadManifests) {
  EXPECT_EQ(ParseRunConfig("{").status().code(), absl::StatusCode::kInvalidArgument);
  EXPECT_EQ(ParseRunConfig(R"({"sed": 1})").status().code(), absl::StatusCode::kInvalidArgument);
  EXPECT_EQ(ParseRunConfig(R"({"randomizer": {"mechanism": "laplace"}})").status().code(),
            absl::StatusCode::kInvalidArgument);
  EXPECT_EQ(ParseRunConfig(R"({"codec": {"m": -1}})").status().code(),
            absl::StatusCode::kInvalidArgument);
  Overrides o;
  o.epsilon = 0;
  EXPECT_EQ(Finalize(*ParseRunConfig(kSmall), o).status().code(),
            absl::StatusCode::kInvalidArgument);
  const auto csv = ParseRunConfig(R"({"dataset": {"type": "csv", "path": "/no/such.csv"}})");
  EXPECT_EQ(Finalize(*csv, {}).status().code(), absl::StatusCode::kNotFound);
  const auto pinned = ParseRunConfig(R"({"federation": {"clients": 2, "clients_per_round": 3}})");
  EXPECT_EQ(Finalize(*pinned, {}).status().code(), absl::StatusCode::kInvalidArgument);
}

TEST(PreparedFileTest, RoundTripIsBitExact) {
  PreparedClient c;
  c.id = 4;
  c.feature_count = 3;
  c.bits_per_value = 3;
  c.pad_values = 1;
  c.num_classes = 5;
  c.rows = {*BitString::Parse("101100111001"), *BitString::Parse("000000000001")};
  c.labels = {4, 0};
  const std::string bytes = EncodePrepared(c);
  EXPECT_EQ(bytes.substr(0, 6), "LDPFLD");
  EXPECT_EQ(bytes.size(), 30u + 2 * 3);
  const PreparedClient back = *DecodePrepared(bytes, 4);
  EXPECT_EQ(back.rows, c.rows);
  EXPECT_EQ(back.labels, c.labels);
  EXPECT_EQ(back.pad_values, 1);
  EXPECT_EQ(DecodePrepared(bytes.substr(0, bytes.size() - 1), 4).status().code(),
            absl::StatusCode::kDataLoss);
  EXPECT_EQ(DecodePrepared("LDPFLX" + bytes.substr(6), 4).status().code(),
            absl::StatusCode::kDataLoss);
}

TEST(CommandsTest, PrepareSimulateReport) {
  const std::string dir = TempDir("flow");
  const RunConfig cfg = SmallConfig(dir);
  std::ostringstream out, err;
  ASSERT_EQ(CmdPrepare(cfg, false, out, err), kExitOk) << err.str();
  EXPECT_THAT(out.str(), HasSubstr("sensitivity rl = 60"));
  EXPECT_THAT(out.str(), HasSubstr("effective epsilon = 0.5"));
  EXPECT_TRUE(fs::exists(ClientFilePath(cfg, 0)));
  EXPECT_TRUE(fs::exists(ClientFilePath(cfg, 1)));
  EXPECT_FALSE(fs::exists(fs::path(dir) / "debug"));
  EXPECT_EQ(ReadPrepared(ClientFilePath(cfg, 0), 0)->rows.size(), 45u);

  ASSERT_EQ(CmdSimulate(cfg, out, err), kExitOk) << err.str();
  std::ifstream metrics(MetricsPath(cfg));
  std::string line;
  int lines = 0;
  while (std::getline(metrics, line)) {
    ASSERT_TRUE(RoundRecordFromJson(line).ok()) << line;
    ++lines;
  }
  EXPECT_EQ(lines, 2);
  EXPECT_TRUE(ReadCheckpoint(CheckpointPath(cfg)).ok());

  std::ostringstream rep;
  ASSERT_EQ(CmdReport({MetricsPath(cfg)}, dir + "/report", rep, err), kExitOk) << err.str();
  const std::string csv = Slurp(dir + "/report/" + fs::path(dir).filename().string() +
                                "_convergence.csv");
  EXPECT_THAT(csv, HasSubstr("round,global_accuracy,global_loss\n1,"));
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 3);
}

TEST(CommandsTest, SingleRoundGivesOneRecord) {
  Overrides o;
  o.rounds = 1;
  const RunConfig cfg = SmallConfig(TempDir("one"), o);
  std::ostringstream out, err;
  ASSERT_EQ(CmdPrepare(cfg, false, out, err), kExitOk);
  ASSERT_EQ(CmdSimulate(cfg, out, err), kExitOk);
  const std::string text = Slurp(MetricsPath(cfg));
  EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), 1);
}

TEST(CommandsTest, DebugWritesRawFeatures) {
  const RunConfig cfg = SmallConfig(TempDir("debug"));
  std::ostringstream out, err;
  ASSERT_EQ(CmdPrepare(cfg, true, out, err), kExitOk);
  EXPECT_TRUE(fs::exists(fs::path(cfg.out_dir) / "debug" / "client_000_features.csv"));
}

TEST(CommandsTest, RerunIsByteIdentical) {
  const RunConfig a = SmallConfig(TempDir("det_a"));
  const RunConfig b = SmallConfig(TempDir("det_b"));
  std::ostringstream out, err;
  for (const RunConfig* cfg : {&a, &b}) {
    ASSERT_EQ(CmdPrepare(*cfg, false, out, err), kExitOk);
    ASSERT_EQ(CmdSimulate(*cfg, out, err), kExitOk);
  }
  EXPECT_EQ(Slurp(ClientFilePath(a, 1)), Slurp(ClientFilePath(b, 1)));
  EXPECT_EQ(Slurp(MetricsPath(a)), Slurp(MetricsPath(b)));
  EXPECT_EQ(Slurp(CheckpointPath(a)), Slurp(CheckpointPath(b)));
}

TEST(CommandsTest, PrintsWideTapSensitivity) {
  const RunConfig cfg =
      *Finalize(*ParseRunConfig(R"({
        "dataset": {"type": "synthetic", "classes": 2, "per_class": 10, "dims": 3},
        "extractor": {"hidden": [1152], "max_epochs": 1},
        "federation": {"clients": 2}})"),
                Overrides{.out_dir = TempDir("wide")});
  std::ostringstream out, err;
  ASSERT_EQ(CmdPrepare(cfg, false, out, err), kExitOk) << err.str();
  EXPECT_THAT(out.str(), HasSubstr("sensitivity rl = 11520"));
}

TEST(CommandsTest, SimulateRejectsMismatchedShapes) {
  const RunConfig cfg = SmallConfig(TempDir("shape"));
  std::ostringstream out, err;
  EXPECT_EQ(CmdSimulate(cfg, out, err), kExitData);
  EXPECT_THAT(err.str(), HasSubstr("missing"));
  ASSERT_EQ(CmdPrepare(cfg, false, out, err), kExitOk);
  Overrides o;
  o.clients = 1;
  EXPECT_EQ(CmdSimulate(SmallConfig(cfg.out_dir, o), out, err), kExitData);
  RunConfig wide = cfg;
  wide.pipeline.extractor_hidden = {8, 7};
  EXPECT_EQ(CmdSimulate(wide, out, err), kExitData);
}

TEST(CommandsTest, ReportErrors) {
  std::ostringstream out, err;
  EXPECT_EQ(CmdReport({}, std::nullopt, out, err), kExitUsage);
  const std::string dir = TempDir("bad_report");
  fs::create_directories(dir);
  const std::string path = dir + "/metrics.jsonl";
  std::ofstream(path) << R"({"round":1,"selected":[0],"clients":[],"global_loss":1,"global_accuracy":0.5})"
                      << "\nnot json\n";
  EXPECT_EQ(CmdReport({path}, std::nullopt, out, err), kExitData);
  EXPECT_THAT(err.str(), HasSubstr("metrics.jsonl:2:"));
}

TEST(CommandsTest, ReportComparesRuns) {
  const std::string dir = TempDir("compare");
  for (const char* run : {"a", "b"}) {
    fs::create_directories(dir + "/" + run);
    std::ofstream(dir + "/" + run + "/metrics.jsonl")
        << R"({"round":1,"selected":[0],"clients":[],"global_loss":1,"global_accuracy":0.5})"
        << "\n";
  }
  std::ostringstream out, err;
  ASSERT_EQ(CmdReport({dir + "/a/metrics.jsonl", dir + "/b/metrics.jsonl"}, std::nullopt, out, err),
            kExitOk);
  EXPECT_THAT(out.str(), HasSubstr("metric,a,b\n"));
  EXPECT_THAT(out.str(), HasSubstr("final_accuracy,0.500000,0.500000\n"));
}

TEST(CommandsTest, VerifyExitCodes) {
  std::ostringstream out, err;
  VerifyOptions t1;
  t1.mechanism = "THEOREM1";
  t1.trials = 200000;
  EXPECT_EQ(CmdVerify(t1, out, err), kExitOk) << out.str();

  VerifyOptions oue;
  oue.mechanism = "OUE";
  oue.epsilon = 1.0;
  std::ostringstream oue_out;
  EXPECT_EQ(CmdVerify(oue, oue_out, err), kExitOk);
  EXPECT_THAT(oue_out.str(), HasSubstr("-> 1.000000000000"));

  VerifyOptions bad;
  bad.mechanism = "laplace";
  EXPECT_EQ(CmdVerify(bad, out, err), kExitUsage);
}

}  // namespace
}  // namespace ldpfl::cli
