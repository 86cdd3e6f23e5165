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

// Prints one PASS/FAIL line per acceptance criterion and exits non-zero if
// any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numeric>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "absl/strings/str_format.h"
#include "cli/commands.h"
#include "cli/run_config.h"
#include "ldpfl/bitcodec.h"
#include "ldpfl/federation.h"
#include "ldpfl/neuralnet.h"
#include "ldpfl/pipeline.h"
#include "ldpfl/privacy.h"
#include "ldpfl/randomizer.h"

namespace ldpfl {
namespace {

namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

struct Outcome {
  bool pass = true;
  std::string detail;
  std::vector<std::string> notes;  // printed indented under the verdict

  void Require(bool ok, const std::string& note) {
    pass &= ok;
    notes.push_back((ok ? "ok   " : "BAD  ") + note);
  }
};

double Seconds(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

BitString FromIndex(uint32_t v, int bits) {
  BitString out(bits);
  for (int i = 0; i < bits; ++i) out.Set(i, (v >> (bits - 1 - i)) & 1u);
  return out;
}

// 1. Analytic ratio equals e^eps on the full grid.
Outcome TheoremIdentity() {
  Outcome o;
  const auto start = Clock::now();
  double worst = 0.0;
  int cases = 0;
  for (Mechanism m : {Mechanism::kTheorem1, Mechanism::kTheorem2}) {
    for (double eps : {0.1, 0.5, 1.0, 5.0}) {
      for (double alpha : {1.0, 4.0, 10.0}) {
        for (int64_t rl : {4, 8, 20, 10240, 11520, 20480}) {
          auto ratio = AnalyticRatio({m, eps, alpha, rl});
          const double rel =
              ratio.ok() ? std::fabs(*ratio - std::exp(eps)) / std::exp(eps) : INFINITY;
          if (!(rel <= 1e-9)) {
            o.Require(false, absl::StrFormat("%s eps=%g alpha=%g rl=%d rel err %.3g",
                                             MechanismName(m).data(), eps, alpha, rl, rel));
          }
          worst = std::max(worst, rel);
          ++cases;
        }
      }
    }
  }
  const double secs = Seconds(start);
  o.Require(secs < 1.0, absl::StrFormat("runtime %.4f s < 1 s", secs));
  o.detail = absl::StrFormat("%d cases, max relative error %.3g (tol 1e-9)", cases, worst);
  o.pass &= worst <= 1e-9;
  return o;
}

// 2. Exhaustive and Monte-Carlo audit at rl = 4.
Outcome BruteForceAudit() {
  Outcome o;
  const auto start = Clock::now();
  for (Mechanism m : {Mechanism::kTheorem1, Mechanism::kTheorem2}) {
    for (double eps : {0.5, 1.0}) {
      const RandomizerSpec spec{m, eps, 10.0, 4};
      double worst = -INFINITY;
      BitString w1, w2;
      int pairs = 0;
      for (uint32_t a = 0; a < 16; ++a) {
        for (uint32_t b = 0; b < 16; ++b) {
          const BitString v1 = FromIndex(a, 4), v2 = FromIndex(b, 4);
          if (a == b || !IsBalancedPair(spec, v1, v2)) continue;
          auto r = ExactMaxLogRatio(spec, v1, v2);
          if (!r.ok()) {
            o.Require(false, std::string(r.status().message()));
            continue;
          }
          ++pairs;
          if (*r > worst) {
            worst = *r;
            w1 = v1;
            w2 = v2;
          }
        }
      }
      const std::string name(MechanismName(m));
      o.Require(worst <= eps + 1e-9 && std::fabs(worst - eps) <= 1e-9,
                absl::StrFormat("%s eps=%g: exact max log-ratio %.9f over %d balanced pairs "
                                "(extremal %s vs %s), want %g",
                                name, eps, worst, pairs, w1.ToString(), w2.ToString(), eps));
      auto mc = EmpiricalEpsilon(spec, w1, w2, 1000000, 20260101 + static_cast<int>(eps * 10));
      o.Require(mc.ok() && std::fabs(*mc - worst) <= 0.05,
                absl::StrFormat("%s eps=%g: Monte-Carlo (1e6 trials) %.4f vs enumeration %.4f "
                                "(tol 0.05)",
                                name, eps, mc.ok() ? *mc : NAN, worst));
    }
  }
  const double secs = Seconds(start);
  o.Require(secs < 60.0, absl::StrFormat("runtime %.2f s < 60 s", secs));
  o.detail = "rl=4, alpha=10, eps in {0.5, 1}, THEOREM1 and THEOREM2";
  return o;
}

// 3. Codec roundtrip and saturation on random reals.
Outcome CodecProperties() {
  Outcome o;
  const auto start = Clock::now();
  for (auto [m, n] : {std::pair{4, 5}, std::pair{2, 2}, std::pair{8, 8}}) {
    const CodecConfig cfg = *CodecConfig::Create(m, n);
    const double max = cfg.max_magnitude();
    std::mt19937_64 rng(1000 + 10 * m + n);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    int roundtrip_bad = 0, saturate_bad = 0;
    constexpr int kSamples = 100000;
    for (int i = 0; i < kSamples; ++i) {
      // Half in range, half beyond the representable magnitude.
      const double sign = (i & 2) ? -1.0 : 1.0;
      if (i % 2 == 0) {
        const double x = sign * unit(rng) * max;
        auto bits = EncodeValue(x, cfg);
        auto back = bits.ok() ? DecodeValue(*bits, cfg) : absl::StatusOr<double>(bits.status());
        if (!back.ok() || std::fabs(*back - x) > cfg.resolution()) ++roundtrip_bad;
      } else {
        const double x = sign * (max + cfg.resolution() + unit(rng) * 1e3 * (max + 1));
        auto bits = EncodeValue(x, cfg);
        auto back = bits.ok() ? DecodeValue(*bits, cfg) : absl::StatusOr<double>(bits.status());
        if (!back.ok() || *back != sign * max) ++saturate_bad;
      }
    }
    o.Require(roundtrip_bad == 0 && saturate_bad == 0,
              absl::StrFormat("(m,n)=(%d,%d): %d samples, %d roundtrip and %d saturation "
                              "violations",
                              m, n, kSamples, roundtrip_bad, saturate_bad));
  }
  const double secs = Seconds(start);
  o.Require(secs < 10.0, absl::StrFormat("runtime %.3f s < 10 s", secs));
  o.detail = "1e5 reals per layout, bound 2^-n in range, exact saturation beyond";
  return o;
}

// 4. epsilon_from_pq recovers the UE and OUE budgets.
Outcome UeOueConsistency() {
  Outcome o;
  double worst = 0.0;
  int cases = 0;
  std::vector<double> grid;
  for (int i = 0; i <= 2000; ++i) grid.push_back(std::pow(10.0, -4.0 + i * (std::log10(20.0) + 4.0) / 2000));
  grid.back() = 20.0;
  for (double eps : grid) {
    const auto p = *ProbabilitiesFor({Mechanism::kUE, eps, 1.0, 0});
    auto got = EpsilonFromPQ(p.keep_one_even, p.OneProbability(0, 0));
    const double err = got.ok() ? std::fabs(*got - eps) : INFINITY;
    worst = std::max(worst, err);
    ++cases;
  }
  o.Require(worst <= 1e-9,
            absl::StrFormat("UE: %d budgets in [1e-4, 20], max abs error %.3g", cases, worst));
  const auto oue = *ProbabilitiesFor({Mechanism::kOUE, 1.0, 1.0, 0});
  auto e1 = EpsilonFromPQ(oue.keep_one_even, oue.OneProbability(0, 0));
  o.Require(e1.ok() && std::fabs(*e1 - 1.0) <= 1e-9,
            absl::StrFormat("OUE eps=1: epsilon_from_pq = %.15f", e1.ok() ? *e1 : NAN));
  o.detail = "tolerance 1e-9";
  return o;
}

// 5. Analytic vs central finite-difference gradients.
Outcome GradientCheck() {
  Outcome o;
  const LayerLayout layout = LayerLayout::Classifier({5, 4, 3});
  std::mt19937_64 rng(77);
  std::normal_distribution<double> gauss;
  double worst = 0.0;
  int checked = 0;
  for (int sample = 0; sample < 20; ++sample) {
    ModelParams p = *InitParams(layout, 500 + sample);
    for (double& b : p.layers[0].bias) b = 0.1 * gauss(rng);
    std::vector<double> x(5);
    for (double& v : x) v = gauss(rng);
    const int label = sample % 3;
    const ModelParams g = *LossGradient(p, x, label);
    for (size_t l = 0; l < p.layers.size(); ++l) {
      auto check = [&](std::vector<double>& param, const std::vector<double>& grad) {
        for (size_t j = 0; j < param.size(); ++j) {
          const double saved = param[j];
          param[j] = saved + 1e-5;
          const double up = *CrossEntropyLoss(p, x, label);
          param[j] = saved - 1e-5;
          const double down = *CrossEntropyLoss(p, x, label);
          param[j] = saved;
          const double fd = (up - down) / 2e-5;
          const double denom = std::max({std::fabs(fd), std::fabs(grad[j]), 1e-6});
          worst = std::max(worst, std::fabs(fd - grad[j]) / denom);
          ++checked;
        }
      };
      check(p.layers[l].weights, g.layers[l].weights);
      check(p.layers[l].bias, g.layers[l].bias);
    }
  }
  o.pass = worst <= 1e-4;
  o.detail = absl::StrFormat("[5,4,3], 20 samples, %d partials, max relative error %.3g (tol 1e-4)",
                             checked, worst);
  return o;
}

// 6. FedAvg exact mean and permutation invariance.
Outcome FedAvgExactness() {
  Outcome o;
  const LayerLayout layout = LayerLayout::Classifier({6, 5, 4});
  std::mt19937_64 rng(8);
  std::uniform_int_distribution<int> ints(-1000, 1000);
  for (int v : {1, 2, 3, 4, 8, 10}) {
    std::vector<ModelParams> updates;
    for (int i = 0; i < v; ++i) {
      ModelParams p = *InitParams(layout, i);
      for (DenseLayer& l : p.layers) {
        for (double& w : l.weights) w = ints(rng);
        for (double& b : l.bias) b = ints(rng);
      }
      updates.push_back(p);
    }
    const ModelParams avg = *FederatedAverage(updates);
    bool exact = true;
    for (size_t l = 0; l < avg.layers.size(); ++l) {
      for (size_t j = 0; j < avg.layers[l].weights.size(); ++j) {
        long total = 0;
        for (const ModelParams& u : updates) total += std::lround(u.layers[l].weights[j]);
        exact &= avg.layers[l].weights[j] == static_cast<double>(total) / v;
      }
      for (size_t j = 0; j < avg.layers[l].bias.size(); ++j) {
        long total = 0;
        for (const ModelParams& u : updates) total += std::lround(u.layers[l].bias[j]);
        exact &= avg.layers[l].bias[j] == static_cast<double>(total) / v;
      }
    }
    bool invariant = true;
    for (int t = 0; t < 20; ++t) {
      std::shuffle(updates.begin(), updates.end(), rng);
      invariant &= *FederatedAverage(updates) == avg;
    }
    o.Require(exact && invariant, absl::StrFormat("v=%d: mean exact=%d, permutation invariant=%d",
                                                  v, exact, invariant));
  }
  o.detail = "integer-valued params, 0 ulp";
  return o;
}

// Shared desk-scale setup for criteria 7, 8 and 10.
constexpr const char* kDeskManifest = R"({
  "dataset": {"type": "synthetic", "classes": 10, "per_class": 200, "dims": 16, "spread": 1.0},
  "codec": {"m": 4, "n": 5},
  "randomizer": {"mechanism": "THEOREM2", "epsilon": 0.5, "alpha": 10},
  "extractor": {"hidden": [64, 32], "max_epochs": 60, "patience": 5, "learning_rate": 0.005},
  "model": {"hidden": [64]},
  "federation": {"clients": 2, "local_epochs": 1, "rounds": 30, "learning_rate": 0.001},
  "seed": 1
})";

struct DeskRun {
  bool ok = false;
  std::string error;
  double accuracy = 0.0;
  int64_t rl = 0;
};

DeskRun RunDesk(const cli::Overrides& o) {
  DeskRun run;
  auto cfg = cli::Finalize(*cli::ParseRunConfig(kDeskManifest), o);
  if (!cfg.ok()) {
    run.error = std::string(cfg.status().message());
    return run;
  }
  auto ds = cli::LoadDataset(*cfg);
  if (!ds.ok()) {
    run.error = std::string(ds.status().message());
    return run;
  }
  auto set = PrepareClients(*ds, cfg->pipeline);
  if (!set.ok()) {
    run.error = std::string(set.status().message());
    return run;
  }
  run.rl = set->sensitivity.delta_f;
  const SimulationResult r = SimulatePrepared(set->clients, cfg->pipeline);
  if (!r.status.ok() || r.history.empty()) {
    run.error = std::string(r.status.message());
    return run;
  }
  run.ok = true;
  run.accuracy = r.history.back().global_accuracy;
  return run;
}

cli::Overrides Seeded(uint64_t seed) {
  cli::Overrides o;
  o.seed = seed;
  return o;
}

// 7. End-to-end desk-scale pipeline.
Outcome DeskPipeline() {
  Outcome o;
  const auto start = Clock::now();
  const DeskRun priv = RunDesk(Seeded(1));
  cli::Overrides none = Seeded(1);
  none.mechanism = "NONE";
  const DeskRun base = RunDesk(none);
  o.Require(priv.ok && priv.rl <= 320,
            absl::StrFormat("rl = %d <= 320 %s", priv.rl, priv.error));
  o.Require(priv.ok && priv.accuracy >= 0.30,
            absl::StrFormat("(a) THEOREM2 eps=0.5 alpha=10 final accuracy %.4f >= 0.30",
                            priv.accuracy));
  o.Require(base.ok && priv.ok && base.accuracy > priv.accuracy,
            absl::StrFormat("(b) non-private baseline %.4f > private %.4f %s", base.accuracy,
                            priv.accuracy, base.error));
  double sum4 = 0.0, sum10 = 0.0;
  bool all_ok = true;
  std::string per_seed;
  constexpr int kSeeds = 5;
  for (uint64_t seed = 1; seed <= kSeeds; ++seed) {
    cli::Overrides a4 = Seeded(seed);
    a4.alpha = 4.0;
    const DeskRun r4 = RunDesk(a4);
    const DeskRun r10 = seed == 1 ? priv : RunDesk(Seeded(seed));
    all_ok &= r4.ok && r10.ok;
    sum4 += r4.accuracy;
    sum10 += r10.accuracy;
    per_seed += absl::StrFormat(" s%d:%.3f/%.3f", seed, r10.accuracy, r4.accuracy);
  }
  o.Require(all_ok && sum10 / kSeeds >= sum4 / kSeeds,
            absl::StrFormat("(c) mean over %d seeds alpha=10 %.4f >= alpha=4 %.4f (a10/a4:%s)",
                            kSeeds, sum10 / kSeeds, sum4 / kSeeds, per_seed));
  const double secs = Seconds(start);
  o.Require(secs < 600.0, absl::StrFormat("runtime %.1f s < 600 s", secs));
  o.detail = "10-class blobs, 2000 rows, 16 dims, 2 clients, r=32, m=4 n=5, E=30";
  return o;
}

// 8. Accuracy does not grow with the number of clients.
Outcome ClientCountTrend() {
  Outcome o;
  const std::vector<int> counts = {2, 5, 10};
  std::vector<double> means;
  constexpr int kSeeds = 5;
  for (int n : counts) {
    double sum = 0.0;
    for (uint64_t seed = 1; seed <= kSeeds; ++seed) {
      cli::Overrides ov = Seeded(seed);
      ov.clients = n;
      const DeskRun r = RunDesk(ov);
      if (!r.ok) o.Require(false, absl::StrFormat("N=%d seed=%d: %s", n, seed, r.error));
      sum += r.accuracy;
    }
    means.push_back(sum / kSeeds);
  }
  int inversions = 0;
  double largest = 0.0;
  for (size_t i = 1; i < means.size(); ++i) {
    if (means[i] > means[i - 1]) {
      ++inversions;
      largest = std::max(largest, means[i] - means[i - 1]);
    }
  }
  o.Require(inversions == 0 || (inversions == 1 && largest <= 0.01),
            absl::StrFormat("means N=2 %.4f, N=5 %.4f, N=10 %.4f; %d inversions (max %.4f)",
                            means[0], means[1], means[2], inversions, largest));
  o.detail = "2000 rows split over N clients, 5 seeds each";
  return o;
}

// 9. Composition accountant.
Outcome Composition() {
  Outcome o;
  bool parallel = true;
  for (int n = 1; n <= 1000; n = n < 10 ? n + 1 : n * 10) {
    const std::vector<PrivacyBudget> b(n, PrivacyBudget{0.5, "client"});
    auto r = ComposeParallel(b);
    parallel &= r.ok() && r->epsilon == 0.5;
  }
  o.Require(parallel, "compose_parallel([0.5] x N) == 0.5 for N in 1..10, 100, 1000");
  const std::vector<PrivacyBudget> seq = {{0.1, "a"}, {0.2, "b"}, {0.3, "c"}};
  auto s = ComposeSequential(seq);
  o.Require(s.ok() && s->epsilon == 0.6,
            absl::StrFormat("compose_sequential([0.1, 0.2, 0.3]) = %.17g", s.ok() ? s->epsilon : NAN));
  return o;
}

std::string Slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

// 10. Two full CLI runs produce byte-identical artifacts.
Outcome Determinism() {
  Outcome o;
  std::vector<fs::path> dirs;
  for (const char* name : {"run_a", "run_b"}) {
    const fs::path dir = fs::temp_directory_path() / "ldpfl_acceptance" / name;
    fs::remove_all(dir);
    cli::Overrides ov;
    ov.out_dir = dir.string();
    const cli::RunConfig cfg = *cli::Finalize(*cli::ParseRunConfig(kDeskManifest), ov);
    std::ostringstream out, err;
    const int prep = cli::CmdPrepare(cfg, false, out, err);
    const int sim = prep == 0 ? cli::CmdSimulate(cfg, out, err) : prep;
    o.Require(sim == 0, absl::StrFormat("%s: prepare+simulate exit %d %s", name, sim, err.str()));
    dirs.push_back(dir);
  }
  std::vector<fs::path> files;
  for (const auto& entry : fs::recursive_directory_iterator(dirs[0])) {
    if (entry.is_regular_file()) files.push_back(fs::relative(entry.path(), dirs[0]));
  }
  std::sort(files.begin(), files.end());
  int identical = 0;
  for (const fs::path& rel : files) {
    const bool same = fs::exists(dirs[1] / rel) && Slurp(dirs[0] / rel) == Slurp(dirs[1] / rel);
    identical += same;
    if (!same) o.Require(false, "differs: " + rel.string());
  }
  o.Require(files.size() >= 4, absl::StrFormat("%d of %d files byte-identical (prepared, metrics, "
                                               "checkpoint)",
                                               identical, files.size()));
  return o;
}

}  // namespace
}  // namespace ldpfl

int main() {
  using ldpfl::Outcome;
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria = {
      {"theorem identity suite", ldpfl::TheoremIdentity},
      {"brute-force LDP audit", ldpfl::BruteForceAudit},
      {"codec property suite", ldpfl::CodecProperties},
      {"UE/OUE consistency", ldpfl::UeOueConsistency},
      {"gradient check", ldpfl::GradientCheck},
      {"FedAvg exactness", ldpfl::FedAvgExactness},
      {"end-to-end desk-scale pipeline", ldpfl::DeskPipeline},
      {"client-count trend", ldpfl::ClientCountTrend},
      {"composition accountant", ldpfl::Composition},
      {"determinism", ldpfl::Determinism},
  };
  int failed = 0;
  for (size_t i = 0; i < criteria.size(); ++i) {
    const Outcome o = criteria[i].second();
    failed += !o.pass;
    std::printf("%s criterion %zu: %s%s%s\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first,
                o.detail.empty() ? "" : " | ", o.detail.c_str());
    for (const std::string& note : o.notes) std::printf("    %s\n", note.c_str());
    std::fflush(stdout);
  }
  std::printf("%zu criteria, %d failed\n", criteria.size(), failed);
  return failed == 0 ? 0 : 1;
}
