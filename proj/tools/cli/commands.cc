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

#include "cli/commands.h"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include "absl/strings/str_cat.h"
#include "absl/strings/str_format.h"
#include "cli/prepared_file.h"
#include "ldpfl/federation.h"
#include "ldpfl/pipeline.h"
#include "ldpfl/privacy.h"

namespace ldpfl::cli {
namespace {

namespace fs = std::filesystem;

int Fail(std::ostream& err, const absl::Status& status) {
  err << "error: " << status.message() << "\n";
  return ExitCodeFor(status);
}

absl::Status MakeDir(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) return absl::InvalidArgumentError(absl::StrCat("cannot create ", dir, ": ", ec.message()));
  return absl::OkStatus();
}

std::string Name(Mechanism m) { return std::string(MechanismName(m)); }

std::string FormatDouble(double v) { return absl::StrFormat("%.6f", v); }

// ---- verify ---------------------------------------------------------------

struct Tally {
  int passed = 0;
  int failed = 0;
  void Record(std::ostream& out, bool ok, const std::string& line) {
    (ok ? passed : failed)++;
    out << (ok ? "PASS " : "FAIL ") << line << "\n";
  }
};

bool Selected(const VerifyOptions& o, Mechanism m) {
  if (!o.mechanism) return true;
  auto parsed = ParseMechanism(*o.mechanism);
  return parsed.ok() && *parsed == m;
}

void VerifyAnalytic(const VerifyOptions& o, Mechanism m, Tally& t, std::ostream& out) {
  const std::vector<double> eps =
      o.epsilon ? std::vector<double>{*o.epsilon} : std::vector<double>{0.1, 0.5, 1, 5};
  const std::vector<double> alphas =
      o.alpha ? std::vector<double>{*o.alpha} : std::vector<double>{1, 4, 10};
  const std::vector<int64_t> lengths = {4, 8, 20, 10240, 11520, 20480};
  double worst = 0.0;
  int cases = 0;
  std::string first_bad;
  for (double e : eps) {
    for (double a : alphas) {
      for (int64_t rl : lengths) {
        if (m == Mechanism::kTheorem2 && rl % 4 != 0) continue;
        auto ratio = AnalyticRatio({m, e, a, rl});
        const double rel = ratio.ok() ? std::fabs(*ratio - std::exp(e)) / std::exp(e) : INFINITY;
        if (!(rel <= 1e-9) && first_bad.empty()) {
          first_bad = absl::StrFormat(" first mismatch eps=%g alpha=%g rl=%d", e, a, rl);
        }
        worst = std::max(worst, rel);
        ++cases;
      }
    }
  }
  t.Record(out, first_bad.empty(),
           absl::StrFormat("analytic %s: %d cases, ratio vs e^eps max rel err %.3g%s",
                           Name(m), cases, worst, first_bad));
}

void VerifyPQ(const VerifyOptions& o, Mechanism m, Tally& t, std::ostream& out) {
  const double e = o.epsilon.value_or(1.0);
  auto probs = ProbabilitiesFor({m, e, 1.0, 0});
  if (!probs.ok()) {
    t.Record(out, false, absl::StrCat("epsilon_from_pq ", Name(m), ": ",
                                      probs.status().message()));
    return;
  }
  const double p = probs->keep_one_even;
  const double q = probs->OneProbability(0, 0);
  auto got = EpsilonFromPQ(p, q);
  const bool ok = got.ok() && std::fabs(*got - e) <= 1e-9;
  t.Record(out, ok,
           absl::StrFormat("epsilon_from_pq %s eps=%g: p=%.12f q=%.12f -> %.12f",
                           Name(m), e, p, q, got.ok() ? *got : NAN));
}

void VerifyAudit(const VerifyOptions& o, Mechanism m, Tally& t, std::ostream& out) {
  constexpr int kBits = 4;
  const std::vector<double> eps =
      o.epsilon ? std::vector<double>{*o.epsilon} : std::vector<double>{0.5, 1.0};
  const double alpha = o.alpha.value_or(10.0);
  for (double e : eps) {
    const RandomizerSpec spec{m, e, alpha, kBits};
    double worst = -INFINITY;
    BitString worst_v1, worst_v2;
    int pairs = 0;
    bool error = false;
    for (uint32_t a = 0; a < (1u << kBits); ++a) {
      for (uint32_t b = 0; b < (1u << kBits); ++b) {
        BitString v1(kBits), v2(kBits);
        for (int i = 0; i < kBits; ++i) {
          v1.Set(i, (a >> (kBits - 1 - i)) & 1u);
          v2.Set(i, (b >> (kBits - 1 - i)) & 1u);
        }
        if (a == b || !IsBalancedPair(spec, v1, v2)) continue;
        auto r = ExactMaxLogRatio(spec, v1, v2);
        if (!r.ok()) {
          error = true;
          continue;
        }
        ++pairs;
        if (*r > worst) {
          worst = *r;
          worst_v1 = v1;
          worst_v2 = v2;
        }
      }
    }
    const bool bounded = !error && pairs > 0 && worst <= e + 1e-9;
    t.Record(out, bounded,
             absl::StrFormat("audit %s rl=4 eps=%g alpha=%g: exact max log-ratio %.9f over "
                             "%d balanced pairs (extremal %s vs %s), bound %g",
                             Name(m), e, alpha, worst, pairs, worst_v1.ToString(),
                             worst_v2.ToString(), e));
    if (pairs == 0) continue;
    auto mc = EmpiricalEpsilon(spec, worst_v1, worst_v2, o.trials, o.seed);
    const bool close = mc.ok() && std::fabs(*mc - worst) <= 0.05;
    t.Record(out, close,
             absl::StrFormat("audit %s rl=4 eps=%g: Monte-Carlo %.4f (%d trials) vs exact %.4f",
                             Name(m), e, mc.ok() ? *mc : NAN, o.trials, worst));
  }
}

// ---- report ---------------------------------------------------------------

struct Run {
  std::string name;
  std::vector<RoundRecord> rounds;
};

absl::StatusOr<Run> ReadMetrics(const std::string& path) {
  std::ifstream in(path);
  if (!in) return absl::NotFoundError(absl::StrCat("cannot open ", path));
  Run run;
  std::string line;
  for (int n = 1; std::getline(in, line); ++n) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    auto rec = RoundRecordFromJson(line);
    if (!rec.ok()) {
      return absl::DataLossError(absl::StrCat(path, ":", n, ": ", rec.status().message()));
    }
    run.rounds.push_back(*std::move(rec));
  }
  if (run.rounds.empty()) return absl::DataLossError(absl::StrCat(path, ": no metrics records"));
  const fs::path p(path);
  run.name = p.stem() == "metrics" && p.has_parent_path() ? p.parent_path().filename().string()
                                                           : p.stem().string();
  return run;
}

std::string ConvergenceCsv(const Run& run) {
  std::string csv = "round,global_accuracy,global_loss\n";
  for (const RoundRecord& r : run.rounds) {
    absl::StrAppend(&csv, r.round, ",", FormatDouble(r.global_accuracy), ",",
                    FormatDouble(r.global_loss), "\n");
  }
  return csv;
}

std::string ComparisonCsv(const std::vector<Run>& runs) {
  std::string csv = "metric";
  for (const Run& r : runs) absl::StrAppend(&csv, ",", r.name);
  csv += "\n";
  const auto row = [&](const char* label, auto value) {
    csv += label;
    for (const Run& r : runs) absl::StrAppend(&csv, ",", value(r));
    csv += "\n";
  };
  row("rounds", [](const Run& r) { return absl::StrCat(r.rounds.size()); });
  row("final_accuracy", [](const Run& r) { return FormatDouble(r.rounds.back().global_accuracy); });
  row("final_loss", [](const Run& r) { return FormatDouble(r.rounds.back().global_loss); });
  row("best_accuracy", [](const Run& r) {
    double best = 0.0;
    for (const RoundRecord& x : r.rounds) best = std::max(best, x.global_accuracy);
    return FormatDouble(best);
  });
  return csv;
}

absl::Status WriteText(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) return absl::InvalidArgumentError(absl::StrCat("cannot write ", path));
  out << text;
  return out ? absl::OkStatus() : absl::DataLossError(absl::StrCat("short write to ", path));
}

}  // namespace

int ExitCodeFor(const absl::Status& status) {
  switch (status.code()) {
    case absl::StatusCode::kOk:
      return kExitOk;
    case absl::StatusCode::kInvalidArgument:
    case absl::StatusCode::kNotFound:
    case absl::StatusCode::kResourceExhausted:
      return kExitUsage;
    default:
      return kExitData;
  }
}

int CmdPrepare(const RunConfig& cfg, bool debug, std::ostream& out, std::ostream& err) {
  auto ds = LoadDataset(cfg);
  if (!ds.ok()) return Fail(err, ds.status());
  auto set = PrepareClients(*ds, cfg.pipeline, debug);
  if (!set.ok()) return Fail(err, set.status());
  if (auto s = MakeDir(PreparedDir(cfg)); !s.ok()) return Fail(err, s);

  for (const PreparedClient& client : set->clients) {
    const std::string path = ClientFilePath(cfg, client.id);
    if (auto s = WritePrepared(path, client); !s.ok()) return Fail(err, s);
    out << "client " << client.id << ": " << client.rows.size() << " rows -> " << path << "\n";
  }
  if (debug) {
    const std::string dir = (fs::path(cfg.out_dir) / "debug").string();
    if (auto s = MakeDir(dir); !s.ok()) return Fail(err, s);
    for (size_t i = 0; i < set->raw_features.size(); ++i) {
      const std::string path =
          (fs::path(dir) / absl::StrFormat("client_%03d_features.csv", i)).string();
      if (auto s = WriteCsv(set->raw_features[i], path); !s.ok()) return Fail(err, s);
      out << "debug: raw features for client " << i << " -> " << path << "\n";
    }
  }
  const SensitivityRecord& sens = set->sensitivity;
  out << "sensitivity rl = " << sens.delta_f << " (r=" << cfg.pipeline.FeatureCount()
      << " plus " << sens.feature_count - cfg.pipeline.FeatureCount() << " pad, l="
      << sens.bits_per_value << ")\n";
  if (cfg.pipeline.randomize) {
    out << "effective epsilon = " << set->protocol_budget.epsilon << " ("
        << MechanismLabel(cfg.pipeline) << ", alpha=" << cfg.pipeline.alpha
        << ", parallel composition over " << set->clients.size() << " clients)\n";
  } else {
    out << "effective epsilon = inf (randomization disabled)\n";
  }
  return kExitOk;
}

int CmdSimulate(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  const PipelineConfig& p = cfg.pipeline;
  const int n = p.federation.num_clients;
  const int r = p.FeatureCount();
  const int l = p.codec.bits_per_value();
  const int pad = PadValuesFor(p.mechanism, p.randomize, r, l);
  std::vector<PreparedClient> clients;
  for (int id = 0; id < n; ++id) {
    const std::string path = ClientFilePath(cfg, id);
    if (!fs::exists(path)) {
      return Fail(err, absl::FailedPreconditionError(
                           absl::StrCat(path, " is missing; run prepare with this config")));
    }
    auto client = ReadPrepared(path, id);
    if (!client.ok()) return Fail(err, client.status());
    if (client->feature_count != r || client->bits_per_value != l || client->pad_values != pad) {
      return Fail(err, absl::FailedPreconditionError(absl::StrFormat(
                           "%s has r=%d l=%d pad=%d but the config implies r=%d l=%d pad=%d", path,
                           client->feature_count, client->bits_per_value, client->pad_values, r,
                           l, pad)));
    }
    clients.push_back(*std::move(client));
  }
  if (fs::exists(ClientFilePath(cfg, n))) {
    return Fail(err, absl::FailedPreconditionError(absl::StrCat(
                         PreparedDir(cfg), " holds more than the ", n, " configured clients")));
  }

  if (auto s = MakeDir(cfg.out_dir); !s.ok()) return Fail(err, s);
  std::ofstream metrics(MetricsPath(cfg), std::ios::binary | std::ios::trunc);
  if (!metrics) return Fail(err, absl::InvalidArgumentError("cannot write " + MetricsPath(cfg)));
  const SimulationResult result = SimulatePrepared(clients, p, [&](const RoundRecord& rec) {
    metrics << RoundRecordToJson(rec) << "\n";
    metrics.flush();
    out << absl::StrFormat("round %d/%d accuracy %.4f loss %.4f\n", rec.round,
                           p.federation.rounds, rec.global_accuracy, rec.global_loss);
  });
  metrics.close();
  if (!result.status.ok()) return Fail(err, result.status);
  if (auto s = WriteCheckpoint(CheckpointPath(cfg), result.global); !s.ok()) return Fail(err, s);
  out << "metrics -> " << MetricsPath(cfg) << "\n";
  out << "checkpoint -> " << CheckpointPath(cfg) << "\n";
  return kExitOk;
}

int CmdVerify(const VerifyOptions& opts, std::ostream& out, std::ostream& err) {
  if (opts.mechanism && !ParseMechanism(*opts.mechanism).ok()) {
    return Fail(err, ParseMechanism(*opts.mechanism).status());
  }
  if (opts.epsilon && !(*opts.epsilon > 0.0)) {
    return Fail(err, absl::InvalidArgumentError("epsilon must be > 0"));
  }
  if (opts.alpha && !(*opts.alpha >= 1.0)) {
    return Fail(err, absl::InvalidArgumentError("alpha must be >= 1"));
  }
  if (opts.trials < kMinAuditTrials) {
    return Fail(err, absl::InvalidArgumentError(
                         absl::StrCat("need at least ", kMinAuditTrials, " audit trials")));
  }
  Tally t;
  for (Mechanism m : {Mechanism::kTheorem1, Mechanism::kTheorem2}) {
    if (Selected(opts, m)) VerifyAnalytic(opts, m, t, out);
  }
  for (Mechanism m : {Mechanism::kUE, Mechanism::kOUE}) {
    if (Selected(opts, m)) VerifyPQ(opts, m, t, out);
  }
  for (Mechanism m : {Mechanism::kTheorem1, Mechanism::kTheorem2}) {
    if (Selected(opts, m)) VerifyAudit(opts, m, t, out);
  }
  out << t.passed << " passed, " << t.failed << " failed\n";
  return t.failed == 0 ? kExitOk : kExitVerify;
}

int CmdReport(const std::vector<std::string>& metrics_files,
              const std::optional<std::string>& out_dir, std::ostream& out, std::ostream& err) {
  if (metrics_files.empty()) {
    return Fail(err, absl::InvalidArgumentError("report needs at least one metrics file"));
  }
  std::vector<Run> runs;
  std::map<std::string, int> seen;
  for (const std::string& path : metrics_files) {
    auto run = ReadMetrics(path);
    if (!run.ok()) {
      // A missing or malformed metrics file is a data problem here.
      return Fail(err, run.status().code() == absl::StatusCode::kNotFound
                           ? absl::DataLossError(run.status().message())
                           : run.status());
    }
    if (const int k = seen[run->name]++; k > 0) run->name += absl::StrCat("_", k + 1);
    runs.push_back(*std::move(run));
  }
  if (out_dir) {
    if (auto s = MakeDir(*out_dir); !s.ok()) return Fail(err, s);
    for (const Run& run : runs) {
      const std::string path = (fs::path(*out_dir) / (run.name + "_convergence.csv")).string();
      if (auto s = WriteText(path, ConvergenceCsv(run)); !s.ok()) return Fail(err, s);
      out << run.name << " -> " << path << "\n";
    }
    const std::string path = (fs::path(*out_dir) / "comparison.csv").string();
    if (auto s = WriteText(path, ComparisonCsv(runs)); !s.ok()) return Fail(err, s);
    out << "comparison -> " << path << "\n";
  } else {
    for (const Run& run : runs) out << "# " << run.name << "\n" << ConvergenceCsv(run) << "\n";
  }
  out << ComparisonCsv(runs);
  return kExitOk;
}

}  // namespace ldpfl::cli
