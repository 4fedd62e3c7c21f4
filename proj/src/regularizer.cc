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

#include "dpmix/regularizer.h"

#include <string>

#include "dpmix/errors.h"

namespace dpmix {

StepIncrement make_increment(const VectorXd& transition_feature,
                             double transition_target,
                             const VectorXd& reward_feature, double reward) {
  return StepIncrement{transition_feature * transition_feature.transpose(),
                       transition_feature * transition_target,
                       reward_feature * reward_feature.transpose(),
                       reward_feature * reward};
}

std::uint64_t noise_seed_for(std::uint64_t run_seed) {
  std::seed_seq seq{static_cast<std::uint32_t>(run_seed),
                    static_cast<std::uint32_t>(run_seed >> 32), 0x6e6f6973u};
  std::uint32_t words[2];
  seq.generate(words, words + 2);
  return (static_cast<std::uint64_t>(words[0]) << 32) | words[1];
}

TreeRegularizer::TreeRegularizer(int horizon, int d1, int d2, int num_episodes,
                                 const Scales& scales, std::uint64_t noise_seed)
    : scales_(scales), rng_(noise_seed) {
  if (horizon < 1 || d1 < 1 || d2 < 1 || num_episodes < 1) {
    throw DomainError("horizon, dimensions and K must be positive");
  }
  if (!(scales.shift_p > 0.0) || !(scales.shift_r > 0.0)) {
    throw DomainError("diagonal shift must be positive");
  }
  steps_.reserve(horizon);
  for (int h = 0; h < horizon; ++h) {
    steps_.push_back(StepTrees{
        NoisyPSumTree(ElementShape::kSymmetricMatrix, d1, scales.sigma_p1, num_episodes),
        NoisyPSumTree(ElementShape::kVector, d1, scales.sigma_p2, num_episodes),
        NoisyPSumTree(ElementShape::kSymmetricMatrix, d2, scales.sigma_r1, num_episodes),
        NoisyPSumTree(ElementShape::kVector, d2, scales.sigma_r2, num_episodes)});
  }
}

void TreeRegularizer::ingest(int k, const std::vector<StepIncrement>& increments) {
  if (k != ingested_ + 1) {
    throw ProtocolError("expected episode " + std::to_string(ingested_ + 1) +
                        ", got " + std::to_string(k));
  }
  if (static_cast<int>(increments.size()) != horizon()) {
    throw DomainError("need one increment per step");
  }
  for (int h = 0; h < horizon(); ++h) {
    const StepIncrement& inc = increments[h];
    StepTrees& trees = steps_[h];
    trees.gram_p.append(inc.gram_p, rng_);
    trees.target_p.append(inc.target_p, rng_);
    trees.gram_r.append(inc.gram_r, rng_);
    trees.target_r.append(inc.target_r, rng_);
  }
  ++ingested_;
}

void TreeRegularizer::CheckRelease(int k) const {
  if (k < 0 || k > ingested_) {
    throw ProtocolError("release(" + std::to_string(k) + ") after " +
                        std::to_string(ingested_) + " ingested episodes");
  }
}

RegularizedStats TreeRegularizer::release(int k) const {
  CheckRelease(k);
  RegularizedStats stats;
  for (const StepTrees& trees : steps_) {
    MatrixXd lambda_p = trees.gram_p.private_prefix(k + 1);
    lambda_p.diagonal().array() += scales_.shift_p;
    MatrixXd lambda_r = trees.gram_r.private_prefix(k + 1);
    lambda_r.diagonal().array() += scales_.shift_r;
    stats.lambda_p.push_back(std::move(lambda_p));
    stats.u_p.push_back(trees.target_p.private_prefix(k + 1));
    stats.lambda_r.push_back(std::move(lambda_r));
    stats.u_r.push_back(trees.target_r.private_prefix(k + 1));
  }
  return stats;
}

RegularizedStats TreeRegularizer::exact_sums(int k) const {
  CheckRelease(k);
  RegularizedStats stats;
  for (const StepTrees& trees : steps_) {
    stats.lambda_p.push_back(trees.gram_p.exact_prefix(k + 1));
    stats.u_p.push_back(trees.target_p.exact_prefix(k + 1));
    stats.lambda_r.push_back(trees.gram_r.exact_prefix(k + 1));
    stats.u_r.push_back(trees.target_r.exact_prefix(k + 1));
  }
  return stats;
}

RegularizedStats TreeRegularizer::regularization_terms(int k) const {
  CheckRelease(k);
  RegularizedStats stats;
  for (const StepTrees& trees : steps_) {
    MatrixXd z_p = trees.gram_p.total_noise(k + 1);
    z_p.diagonal().array() += scales_.shift_p;
    MatrixXd z_r = trees.gram_r.total_noise(k + 1);
    z_r.diagonal().array() += scales_.shift_r;
    stats.lambda_p.push_back(std::move(z_p));
    stats.u_p.push_back(trees.target_p.total_noise(k + 1));
    stats.lambda_r.push_back(std::move(z_r));
    stats.u_r.push_back(trees.target_r.total_noise(k + 1));
  }
  return stats;
}

FixedRidge::FixedRidge(double lambda, int horizon, int d1, int d2, int num_episodes)
    : TreeRegularizer(horizon, d1, d2, num_episodes,
                      Scales{0.0, 0.0, 0.0, 0.0, lambda, lambda}, /*noise_seed=*/0),
      lambda_(lambda) {}

ConfidenceParams FixedRidge::confidence(double alpha) const {
  ConfidenceParams cp;
  cp.alpha = alpha;
  cp.lambda_min_p = cp.lambda_max_p = lambda_;
  cp.lambda_min_r = cp.lambda_max_r = lambda_;
  cp.nu_p = cp.nu_r = 0.0;
  return cp;
}

nlohmann::json FixedRidge::metadata() const {
  return {{"type", "fixed_ridge"}, {"lambda", lambda_}};
}

TreeRegularizer::Scales Privatizer::ScalesFor(const NoiseCalibration& cal,
                                              double floor) {
  Scales scales;
  scales.sigma_p1 = cal.sigma_p1;
  scales.sigma_p2 = cal.sigma_p2;
  scales.sigma_r1 = cal.sigma_r1;
  scales.sigma_r2 = cal.sigma_r2;
  scales.shift_p = cal.shift_p > 0.0 ? 2.0 * cal.shift_p : floor;
  scales.shift_r = cal.shift_r > 0.0 ? 2.0 * cal.shift_r : floor;
  return scales;
}

Privatizer::Privatizer(const NoiseCalibration& calibration, int horizon, int d1,
                       int d2, int num_episodes, std::uint64_t noise_seed,
                       double zero_noise_floor)
    : TreeRegularizer(horizon, d1, d2, num_episodes,
                      ScalesFor(calibration, zero_noise_floor), noise_seed),
      calibration_(calibration),
      zero_noise_(calibration.sigma_p1 == 0.0 && calibration.sigma_p2 == 0.0 &&
                  calibration.sigma_r1 == 0.0 && calibration.sigma_r2 == 0.0),
      floor_(zero_noise_floor) {}

std::unique_ptr<Privatizer> Privatizer::ZeroNoise(int horizon, int d1, int d2,
                                                  int num_episodes,
                                                  std::uint64_t noise_seed,
                                                  double floor) {
  NoiseCalibration cal;
  cal.m = tree_membership_bound(num_episodes);
  return std::make_unique<Privatizer>(cal, horizon, d1, d2, num_episodes,
                                      noise_seed, floor);
}

ConfidenceParams Privatizer::confidence(double alpha) const {
  if (!zero_noise_) return confidence_params(calibration_, alpha);
  // Degenerates to a fixed ridge at the floor.
  ConfidenceParams cp;
  cp.alpha = alpha;
  cp.lambda_min_p = cp.lambda_max_p = scales().shift_p;
  cp.lambda_min_r = cp.lambda_max_r = scales().shift_r;
  return cp;
}

nlohmann::json Privatizer::metadata() const {
  nlohmann::json meta = {{"type", zero_noise_ ? "privatizer_zero_noise" : "privatizer"},
                         {"shift_p", scales().shift_p},
                         {"shift_r", scales().shift_r},
                         {"m", calibration_.m}};
  if (zero_noise_) meta["zero_noise_floor"] = floor_;
  return meta;
}

}  // namespace dpmix
