//
// Copyright 2026 The dpmix Authors
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
//

// Experiment orchestration: run configuration, seed sweeps, regret logs on
// disk, and cross-run summaries.

#ifndef DPMIX_HARNESS_H_
#define DPMIX_HARNESS_H_

#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "dpmix/agents.h"
#include "dpmix/linmix_mdp.h"
#include "dpmix/regularizer.h"

namespace dpmix {

inline constexpr const char* kVersion = "0.1.0";

// Invalid configuration or mismatched inputs; the CLI maps it to exit code 2.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

enum class AgentKind { kValueIteration, kPolicyOptimization };

struct RegularizerSpec {
  enum class Kind { kFixedRidge, kPrivatizer, kPrivatizerZeroNoise };
  Kind kind = Kind::kFixedRidge;
  double lambda = 1.0;
  double epsilon = 1.0;
  double delta = 0.1;
  double zero_noise_floor = 1.0;
};

// Everything a single seeded run needs besides the MDP.
struct RunSettings {
  AgentKind agent = AgentKind::kValueIteration;
  RegularizerSpec regularizer;
  double alpha = 0.1;
  int num_episodes = 1;
  std::optional<double> eta_override;
};

struct RunConfig {
  nlohmann::json mdp;  // inline MDP document
  RunSettings settings;
  std::vector<std::uint64_t> seeds;
  std::filesystem::path output_dir;
  nlohmann::json echo;  // the document as given
};

// Keys: "mdp" (object, path relative to `base_dir`, or "benchmark"),
// "agent" ("vi" | "po"), "regularizer" ({"type": "fixed_ridge", "lambda"} |
// {"type": "privatizer", "epsilon", "delta"} |
// {"type": "privatizer_zero_noise", "floor"?}), "alpha", "K", "seeds",
// "eta_override" (optional), "output_dir" (optional).
RunConfig parse_run_config(const nlohmann::json& doc,
                           const std::filesystem::path& base_dir = {});
RunConfig load_run_config(const std::filesystem::path& path);

std::unique_ptr<TreeRegularizer> make_regularizer(const RunSettings& settings,
                                                  const LinearMixtureMDP& mdp,
                                                  std::uint64_t seed);

struct SingleRun {
  RegretLog log;
  nlohmann::json metadata;
};

// One seeded run.  The sampling generator is seeded with `seed`; the
// privatizer draws from its own generator derived from it.
SingleRun execute_run(const LinearMixtureMDP& mdp, const RunSettings& settings,
                      std::uint64_t seed, const EpisodeObserver& observer = {});

// Header "episode,inst_regret,cum_regret", one row per episode.
std::string regret_csv(const RegretLog& log);

// Runs every seed on a worker pool and writes run_<i>_seed_<s>.csv plus
// run_<i>_seed_<s>.json into `out_dir` (falls back to config.output_dir).
// Returns the written paths.  Throws ConfigError or EpisodeError.
std::vector<std::filesystem::path> run_experiment(
    const RunConfig& config, const std::filesystem::path& out_dir = {},
    unsigned num_workers = 0);

struct CompareRow {
  std::string config;
  int runs = 0;
  int num_episodes = 0;
  std::vector<int> checkpoints;  // K/10, K/2, K
  std::vector<double> cum_mean;
  std::vector<double> cum_std;   // sample standard deviation
  double head_tail_ratio = 0.0;  // mean inst regret, first 10% / last 10%
};

// Per-directory summaries over all run_*.csv files.  Throws ConfigError when
// the logs do not share K.
std::vector<CompareRow> compare(const std::vector<std::filesystem::path>& dirs);
std::string compare_csv(const std::vector<CompareRow>& rows);

// Mean instantaneous regret over the first and last ceil(K/10) episodes.
double head_mean(const std::vector<double>& inst);
double tail_mean(const std::vector<double>& inst);

// Writes via a temporary file and rename.
void write_file_atomic(const std::filesystem::path& path, const std::string& body);

}  // namespace dpmix

#endif  // DPMIX_HARNESS_H_
