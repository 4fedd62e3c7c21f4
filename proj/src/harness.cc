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

#include "dpmix/harness.h"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <fstream>
#include <limits>
#include <mutex>
#include <random>
#include <sstream>
#include <thread>

#include "dpmix/benchmark.h"
#include "dpmix/errors.h"
#include "dpmix/mdp_io.h"
#include "dpmix/privacy_calib.h"

namespace dpmix {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

const json& Required(const json& doc, const char* key) {
  auto it = doc.find(key);
  if (it == doc.end()) throw ConfigError(std::string("config is missing \"") + key + "\"");
  return *it;
}

double NumberField(const json& doc, const char* key) {
  const json& v = Required(doc, key);
  if (!v.is_number()) throw ConfigError(std::string("\"") + key + "\" must be a number");
  return v.get<double>();
}

json ResolveMdp(const json& mdp, const fs::path& base_dir) {
  if (mdp.is_object()) return mdp;
  if (!mdp.is_string()) throw ConfigError("\"mdp\" must be an object or a path");
  const std::string ref = mdp.get<std::string>();
  if (ref == "benchmark") return mdp_to_json(benchmark_mdp());
  fs::path path = ref;
  if (path.is_relative() && !base_dir.empty()) path = base_dir / path;
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open MDP file " + path.string());
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("invalid MDP JSON in " + path.string() + ": " + e.what());
  }
}

std::string FormatDouble(double x) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

std::vector<double> ReadInstColumn(const fs::path& csv) {
  std::ifstream in(csv);
  if (!in) throw ConfigError("cannot read " + csv.string());
  std::string line;
  std::getline(in, line);
  if (line != "episode,inst_regret,cum_regret") {
    throw ConfigError("unexpected header in " + csv.string());
  }
  std::vector<double> inst;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::stringstream row(line);
    std::string episode, value;
    if (!std::getline(row, episode, ',') || !std::getline(row, value, ',')) {
      throw ConfigError("malformed row in " + csv.string());
    }
    inst.push_back(std::stod(value));
  }
  return inst;
}

// Mean and sample standard deviation, accumulated relative to the first
// sample so that identical inputs give exactly their value and zero spread.
std::pair<double, double> MeanAndStd(const std::vector<double>& xs) {
  const double ref = xs.front();
  const double n = static_cast<double>(xs.size());
  double sum = 0.0, sum_sq = 0.0;
  for (double x : xs) {
    sum += x - ref;
    sum_sq += (x - ref) * (x - ref);
  }
  const double mean = ref + sum / n;
  if (xs.size() < 2) return {mean, 0.0};
  const double var = std::max(0.0, (sum_sq - sum * sum / n) / (n - 1.0));
  return {mean, std::sqrt(var)};
}

std::size_t Window(std::size_t n) { return std::max<std::size_t>(1, (n + 9) / 10); }

}  // namespace

RunConfig parse_run_config(const json& doc, const fs::path& base_dir) {
  if (!doc.is_object()) throw ConfigError("config must be a JSON object");
  RunConfig config;
  config.echo = doc;
  try {
    config.mdp = ResolveMdp(Required(doc, "mdp"), base_dir);

    const std::string agent = Required(doc, "agent").get<std::string>();
    if (agent == "vi") {
      config.settings.agent = AgentKind::kValueIteration;
    } else if (agent == "po") {
      config.settings.agent = AgentKind::kPolicyOptimization;
    } else {
      throw ConfigError("unknown agent \"" + agent + "\"");
    }

    const json& reg = Required(doc, "regularizer");
    const std::string type =
        reg.is_string() ? reg.get<std::string>() : Required(reg, "type").get<std::string>();
    RegularizerSpec& spec = config.settings.regularizer;
    if (type == "fixed_ridge") {
      spec.kind = RegularizerSpec::Kind::kFixedRidge;
      spec.lambda = reg.is_object() ? reg.value("lambda", 1.0) : 1.0;
      if (!(spec.lambda > 0.0)) throw ConfigError("lambda must be positive");
    } else if (type == "privatizer") {
      spec.kind = RegularizerSpec::Kind::kPrivatizer;
      spec.epsilon = NumberField(reg, "epsilon");
      spec.delta = NumberField(reg, "delta");
      try {
        validate_budget({spec.epsilon, spec.delta});
      } catch (const DomainError& e) {
        throw ConfigError(e.what());
      }
    } else if (type == "privatizer_zero_noise") {
      spec.kind = RegularizerSpec::Kind::kPrivatizerZeroNoise;
      spec.zero_noise_floor = reg.is_object() ? reg.value("floor", 1.0) : 1.0;
      if (!(spec.zero_noise_floor > 0.0)) throw ConfigError("floor must be positive");
    } else {
      throw ConfigError("unknown regularizer \"" + type + "\"");
    }

    config.settings.alpha = NumberField(doc, "alpha");
    if (!(config.settings.alpha > 0.0 && config.settings.alpha <= 1.0)) {
      throw ConfigError("alpha must lie in (0, 1]");
    }
    const json& k = Required(doc, "K");
    if (!k.is_number_integer() || k.get<long long>() < 1 || k.get<long long>() > (1LL << 30)) {
      throw ConfigError("K must be a positive integer");
    }
    config.settings.num_episodes = k.get<int>();

    const json& seeds = Required(doc, "seeds");
    if (!seeds.is_array() || seeds.empty()) throw ConfigError("seeds must be a non-empty array");
    for (const json& s : seeds) {
      if (!s.is_number_integer() || s.get<long long>() < 0) {
        throw ConfigError("seeds must be non-negative integers");
      }
      config.seeds.push_back(s.get<std::uint64_t>());
    }

    if (auto it = doc.find("eta_override"); it != doc.end() && !it->is_null()) {
      if (!it->is_number() || !(it->get<double>() >= 0.0)) {
        throw ConfigError("eta_override must be a non-negative number");
      }
      config.settings.eta_override = it->get<double>();
    }
    if (auto it = doc.find("output_dir"); it != doc.end() && !it->is_null()) {
      config.output_dir = it->get<std::string>();
      if (config.output_dir.is_relative() && !base_dir.empty()) {
        config.output_dir = base_dir / config.output_dir;
      }
    }
  } catch (const json::exception& e) {
    throw ConfigError(std::string("malformed config: ") + e.what());
  }
  try {
    (void)mdp_from_json(config.mdp);
  } catch (const DomainError& e) {
    throw ConfigError(std::string("invalid MDP: ") + e.what());
  }
  return config;
}

RunConfig load_run_config(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config " + path.string());
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("invalid JSON in " + path.string() + ": " + e.what());
  }
  return parse_run_config(doc, path.parent_path());
}

std::unique_ptr<TreeRegularizer> make_regularizer(const RunSettings& settings,
                                                  const LinearMixtureMDP& mdp,
                                                  std::uint64_t seed) {
  const int horizon = mdp.horizon();
  const int k = settings.num_episodes;
  const RegularizerSpec& spec = settings.regularizer;
  switch (spec.kind) {
    case RegularizerSpec::Kind::kFixedRidge:
      return std::make_unique<FixedRidge>(spec.lambda, horizon, mdp.d1(), mdp.d2(), k);
    case RegularizerSpec::Kind::kPrivatizerZeroNoise:
      return Privatizer::ZeroNoise(horizon, mdp.d1(), mdp.d2(), k, noise_seed_for(seed),
                                   spec.zero_noise_floor);
    case RegularizerSpec::Kind::kPrivatizer: {
      NoiseCalibration cal = calibrate_noise({spec.epsilon, spec.delta}, k, horizon,
                                             mdp.d1(), mdp.d2());
      cal = shift_magnitudes(cal, settings.alpha, k, horizon, mdp.d1(), mdp.d2());
      return std::make_unique<Privatizer>(cal, horizon, mdp.d1(), mdp.d2(), k,
                                          noise_seed_for(seed));
    }
  }
  throw ConfigError("unknown regularizer kind");
}

SingleRun execute_run(const LinearMixtureMDP& mdp, const RunSettings& settings,
                      std::uint64_t seed, const EpisodeObserver& observer) {
  const int k = settings.num_episodes;
  auto reg = make_regularizer(settings, mdp, seed);
  const ConfidenceParams cp =
      with_betas(reg->confidence(settings.alpha), mdp.d1(), mdp.d2(), k, mdp.horizon());
  std::mt19937_64 rng(seed);

  SingleRun run;
  json meta = {{"version", kVersion},
               {"seed", seed},
               {"episodes", k},
               {"agent", settings.agent == AgentKind::kValueIteration ? "vi" : "po"},
               {"regularizer", reg->metadata()},
               {"confidence",
                {{"alpha", cp.alpha},
                 {"beta_p", cp.beta_p},
                 {"beta_r", cp.beta_r},
                 {"lambda_min_p", cp.lambda_min_p},
                 {"lambda_max_p", cp.lambda_max_p},
                 {"lambda_min_r", cp.lambda_min_r},
                 {"lambda_max_r", cp.lambda_max_r},
                 {"nu_p", cp.nu_p},
                 {"nu_r", cp.nu_r}}}};
  if (const auto* priv = dynamic_cast<const Privatizer*>(reg.get());
      priv != nullptr && !priv->zero_noise()) {
    meta["calibration"] = accounting_report(
        priv->calibration(), {settings.regularizer.epsilon, settings.regularizer.delta},
        mdp.horizon());
  }
  if (settings.agent == AgentKind::kValueIteration) {
    run.log = run_vi(mdp, *reg, cp, k, rng, observer);
  } else {
    const POConfig po = settings.eta_override
                            ? POConfig{*settings.eta_override}
                            : default_po_config(mdp.num_actions(), mdp.horizon(), k);
    meta["eta"] = po.eta;
    run.log = run_po(mdp, *reg, cp, po, k, rng, observer);
  }
  meta["cum_regret"] = run.log.cum.back();
  meta["wall_seconds"] = run.log.wall_seconds.back();
  run.metadata = std::move(meta);
  return run;
}

std::string regret_csv(const RegretLog& log) {
  std::string out = "episode,inst_regret,cum_regret\n";
  for (int k = 0; k < log.episodes(); ++k) {
    out += std::to_string(k + 1);
    out += ',';
    out += FormatDouble(log.inst[k]);
    out += ',';
    out += FormatDouble(log.cum[k]);
    out += '\n';
  }
  return out;
}

void write_file_atomic(const fs::path& path, const std::string& body) {
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + tmp.string());
    out << body;
    if (!out) throw std::runtime_error("write failed for " + tmp.string());
  }
  fs::rename(tmp, path);
}

std::vector<fs::path> run_experiment(const RunConfig& config, const fs::path& out_dir,
                                     unsigned num_workers) {
  const fs::path dir = out_dir.empty() ? config.output_dir : out_dir;
  if (dir.empty()) throw ConfigError("no output directory given");
  LinearMixtureMDP mdp = [&] {
    try {
      return mdp_from_json(config.mdp);
    } catch (const DomainError& e) {
      throw ConfigError(std::string("invalid MDP: ") + e.what());
    }
  }();
  fs::create_directories(dir);

  const std::size_t n = config.seeds.size();
  std::vector<fs::path> written(2 * n);
  std::atomic<std::size_t> next{0};
  std::mutex error_mu;
  std::exception_ptr first_error;

  auto worker = [&] {
    for (std::size_t i = next++; i < n; i = next++) {
      try {
        const std::uint64_t seed = config.seeds[i];
        SingleRun run = execute_run(mdp, config.settings, seed);
        run.metadata["run_index"] = i;
        run.metadata["config"] = config.echo;
        const std::string stem = "run_" + std::to_string(i) + "_seed_" + std::to_string(seed);
        written[2 * i] = dir / (stem + ".csv");
        written[2 * i + 1] = dir / (stem + ".json");
        write_file_atomic(written[2 * i], regret_csv(run.log));
        write_file_atomic(written[2 * i + 1], run.metadata.dump(2) + "\n");
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mu);
        if (!first_error) first_error = std::current_exception();
      }
    }
  };
  unsigned workers = num_workers != 0 ? num_workers : std::thread::hardware_concurrency();
  workers = std::max(1u, std::min<unsigned>(workers, static_cast<unsigned>(n)));
  std::vector<std::thread> pool;
  for (unsigned w = 1; w < workers; ++w) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  if (first_error) std::rethrow_exception(first_error);
  return written;
}

double head_mean(const std::vector<double>& inst) {
  if (inst.empty()) return 0.0;
  const std::size_t w = Window(inst.size());
  double acc = 0.0;
  for (std::size_t i = 0; i < w; ++i) acc += inst[i];
  return acc / static_cast<double>(w);
}

double tail_mean(const std::vector<double>& inst) {
  if (inst.empty()) return 0.0;
  const std::size_t w = Window(inst.size());
  double acc = 0.0;
  for (std::size_t i = inst.size() - w; i < inst.size(); ++i) acc += inst[i];
  return acc / static_cast<double>(w);
}

std::vector<CompareRow> compare(const std::vector<fs::path>& dirs) {
  if (dirs.empty()) throw ConfigError("compare needs at least one directory");
  std::vector<CompareRow> rows;
  int shared_k = -1;
  for (const fs::path& dir : dirs) {
    if (!fs::is_directory(dir)) throw ConfigError("not a directory: " + dir.string());
    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(dir)) {
      const std::string name = entry.path().filename().string();
      if (name.rfind("run_", 0) == 0 && entry.path().extension() == ".csv") {
        files.push_back(entry.path());
      }
    }
    std::sort(files.begin(), files.end());
    if (files.empty()) throw ConfigError("no run_*.csv logs in " + dir.string());

    std::vector<std::vector<double>> runs;
    for (const fs::path& f : files) {
      runs.push_back(ReadInstColumn(f));
      const int k = static_cast<int>(runs.back().size());
      if (k < 1) throw ConfigError("empty log " + f.string());
      if (shared_k < 0) shared_k = k;
      if (k != shared_k) {
        throw ConfigError("logs disagree on K: " + std::to_string(shared_k) + " vs " +
                          std::to_string(k) + " in " + f.string());
      }
    }

    CompareRow row;
    row.config = dir.filename().empty() ? dir.parent_path().filename().string()
                                        : dir.filename().string();
    row.runs = static_cast<int>(runs.size());
    row.num_episodes = shared_k;
    row.checkpoints = {std::max(1, shared_k / 10), std::max(1, shared_k / 2), shared_k};
    for (int c : row.checkpoints) {
      std::vector<double> cum;
      for (const auto& inst : runs) {
        double acc = 0.0;
        for (int i = 0; i < c; ++i) acc += inst[i];
        cum.push_back(acc);
      }
      const auto [mean, sd] = MeanAndStd(cum);
      row.cum_mean.push_back(mean);
      row.cum_std.push_back(sd);
    }
    double head = 0.0;
    double tail = 0.0;
    for (const auto& inst : runs) {
      head += head_mean(inst);
      tail += tail_mean(inst);
    }
    row.head_tail_ratio = tail > 0.0 ? head / tail
                                     : (head > 0.0 ? std::numeric_limits<double>::infinity()
                                                   : std::numeric_limits<double>::quiet_NaN());
    rows.push_back(std::move(row));
  }
  return rows;
}

std::string compare_csv(const std::vector<CompareRow>& rows) {
  std::string out =
      "config,runs,K,checkpoint_1,cum_mean_1,cum_std_1,checkpoint_2,cum_mean_2,cum_std_2,"
      "checkpoint_3,cum_mean_3,cum_std_3,head_tail_ratio\n";
  for (const CompareRow& row : rows) {
    out += row.config + ',' + std::to_string(row.runs) + ',' +
           std::to_string(row.num_episodes);
    for (std::size_t i = 0; i < row.checkpoints.size(); ++i) {
      out += ',' + std::to_string(row.checkpoints[i]) + ',' + FormatDouble(row.cum_mean[i]) +
             ',' + FormatDouble(row.cum_std[i]);
    }
    out += ',' + FormatDouble(row.head_tail_ratio) + '\n';
  }
  return out;
}

}  // namespace dpmix
