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

// dpmix_cli: run experiments, summarize regret logs, print calibrations.
//
//   dpmix_cli run --config run.json [--out DIR] [--workers N]
//   dpmix_cli compare DIR... --out summary.csv
//   dpmix_cli calibrate --epsilon 1 --delta 0.1 --K 1000 --H 5 --d1 18 --d2 6 --alpha 0.1
//
// Exit codes: 0 success, 1 runtime failure, 2 invalid configuration.

#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "dpmix/errors.h"
#include "dpmix/harness.h"
#include "dpmix/privacy_calib.h"

namespace {

constexpr int kExitRuntime = 1;
constexpr int kExitConfig = 2;

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Differentially private episodic RL in linear mixture MDPs"};
  app.require_subcommand(1);
  app.set_version_flag("--version", dpmix::kVersion);

  std::string config_path;
  std::string run_out;
  unsigned workers = 0;
  auto* run = app.add_subcommand("run", "Run a seed sweep and write regret logs");
  run->add_option("--config", config_path, "Run configuration (JSON)")->required();
  run->add_option("--out", run_out, "Output directory (overrides output_dir)");
  run->add_option("--workers", workers, "Worker threads (default: hardware concurrency)");

  std::vector<std::string> dirs;
  std::string compare_out;
  auto* cmp = app.add_subcommand("compare", "Summarize regret logs per directory");
  cmp->add_option("dirs", dirs, "Run output directories")->required();
  cmp->add_option("--out", compare_out, "Summary CSV (default: stdout)");

  double epsilon = 1.0, delta = 0.1, alpha = 0.1;
  int episodes = 1, horizon = 1, d1 = 1, d2 = 1;
  auto* cal = app.add_subcommand("calibrate", "Print the privacy accounting report");
  cal->add_option("--epsilon", epsilon)->required();
  cal->add_option("--delta", delta)->required();
  cal->add_option("--K", episodes)->required();
  cal->add_option("--H", horizon)->required();
  cal->add_option("--d1", d1)->required();
  cal->add_option("--d2", d2)->required();
  cal->add_option("--alpha", alpha)->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  }

  try {
    if (*run) {
      const dpmix::RunConfig config = dpmix::load_run_config(config_path);
      const auto files = dpmix::run_experiment(config, run_out, workers);
      for (const auto& f : files) std::cout << f.string() << "\n";
    } else if (*cmp) {
      std::vector<std::filesystem::path> paths(dirs.begin(), dirs.end());
      const std::string body = dpmix::compare_csv(dpmix::compare(paths));
      if (compare_out.empty()) {
        std::cout << body;
      } else {
        dpmix::write_file_atomic(compare_out, body);
      }
    } else if (*cal) {
      const dpmix::PrivacyBudget budget{epsilon, delta};
      dpmix::NoiseCalibration c =
          dpmix::calibrate_noise(budget, episodes, horizon, d1, d2);
      c = dpmix::shift_magnitudes(c, alpha, episodes, horizon, d1, d2);
      std::cout << dpmix::accounting_report(c, budget, horizon).dump(2) << "\n";
    }
  } catch (const dpmix::ConfigError& e) {
    std::cerr << "invalid configuration: " << e.what() << "\n";
    return kExitConfig;
  } catch (const dpmix::DomainError& e) {
    std::cerr << "invalid argument: " << e.what() << "\n";
    return kExitConfig;
  } catch (const dpmix::EpisodeError& e) {
    std::cerr << "run aborted at episode " << e.episode() << ": " << e.what() << "\n";
    return kExitRuntime;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
  return 0;
}
