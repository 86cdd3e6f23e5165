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

#include <cstdint>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "cli/commands.h"
#include "cli/run_config.h"

namespace {

using ldpfl::cli::Overrides;

struct Flags {
  std::string config;
  std::optional<uint64_t> seed;
  std::optional<double> epsilon;
  std::optional<double> alpha;
  std::optional<std::string> mechanism;
  std::optional<int> clients;
  std::optional<int> rounds;
  std::optional<std::string> out;
  bool debug = false;
};

void AddRunFlags(CLI::App* cmd, Flags& f) {
  cmd->add_option("--config", f.config, "JSON run manifest")->check(CLI::ExistingFile);
  cmd->add_option("--seed", f.seed, "master seed");
  cmd->add_option("--epsilon", f.epsilon, "privacy budget");
  cmd->add_option("--alpha", f.alpha, "privacy budget coefficient");
  cmd->add_option("--mechanism", f.mechanism, "UE, OUE, THEOREM1, THEOREM2 or NONE");
  cmd->add_option("--clients", f.clients, "number of clients N");
  cmd->add_option("--rounds", f.rounds, "federated rounds E");
  cmd->add_option("--out", f.out, "output directory");
}

int RunWithConfig(const Flags& f, const std::function<int(const ldpfl::cli::RunConfig&)>& body) {
  absl::StatusOr<ldpfl::cli::RunConfig> cfg =
      f.config.empty() ? ldpfl::cli::RunConfig{} : ldpfl::cli::LoadRunConfig(f.config);
  if (cfg.ok()) {
    Overrides o{f.seed, f.epsilon, f.alpha, f.mechanism, f.clients, f.rounds, f.out};
    cfg = ldpfl::cli::Finalize(*std::move(cfg), o);
  }
  if (!cfg.ok()) {
    std::cerr << "error: " << cfg.status().message() << "\n";
    return ldpfl::cli::kExitUsage;
  }
  return body(*cfg);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Locally differentially private federated learning simulator"};
  app.require_subcommand(1);

  Flags prep;
  CLI::App* prepare = app.add_subcommand("prepare", "train extractors, encode and randomize");
  AddRunFlags(prepare, prep);
  prepare->add_flag("--debug", prep.debug, "also write pre-randomization features");

  Flags sim;
  CLI::App* simulate = app.add_subcommand("simulate", "run federated training on prepared data");
  AddRunFlags(simulate, sim);

  ldpfl::cli::VerifyOptions vopts;
  CLI::App* verify = app.add_subcommand("verify", "audit the randomizers");
  verify->add_option("--mechanism", vopts.mechanism, "restrict to one mechanism");
  verify->add_option("--epsilon", vopts.epsilon, "privacy budget");
  verify->add_option("--alpha", vopts.alpha, "privacy budget coefficient");
  verify->add_option("--seed", vopts.seed, "Monte-Carlo seed");
  verify->add_option("--trials", vopts.trials, "Monte-Carlo trials");

  std::vector<std::string> files;
  std::optional<std::string> report_out;
  CLI::App* report = app.add_subcommand("report", "summarize metrics files");
  report->add_option("metrics", files, "metrics.jsonl files");
  report->add_option("--out", report_out, "directory for CSV output");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return ldpfl::cli::kExitUsage;
  }

  if (*prepare) {
    return RunWithConfig(prep, [&](const ldpfl::cli::RunConfig& cfg) {
      return ldpfl::cli::CmdPrepare(cfg, prep.debug, std::cout, std::cerr);
    });
  }
  if (*simulate) {
    return RunWithConfig(sim, [&](const ldpfl::cli::RunConfig& cfg) {
      return ldpfl::cli::CmdSimulate(cfg, std::cout, std::cerr);
    });
  }
  if (*verify) return ldpfl::cli::CmdVerify(vopts, std::cout, std::cerr);
  return ldpfl::cli::CmdReport(files, report_out, std::cout, std::cerr);
}
