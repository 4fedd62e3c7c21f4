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

// The regularizer contract: turns per-episode statistics into the released
// (Lambda, u) pairs the agents solve against.  Released values are always
//   Lambda = G + Z,  u = g + z
// with G, g the exact accumulated sums.  FixedRidge releases Z = lambda I,
// z = 0; the Privatizer releases tree-mechanism noise plus a PSD shift.

#ifndef DPMIX_REGULARIZER_H_
#define DPMIX_REGULARIZER_H_

#include <cstdint>
#include <memory>
#include <random>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "dpmix/estimation.h"
#include "dpmix/privacy_calib.h"
#include "dpmix/tree_counter.h"

namespace dpmix {

// One step's contribution from one episode.
struct StepIncrement {
  MatrixXd gram_p;    // x x^T, x = phi_h(s_h, a_h)
  VectorXd target_p;  // x V_{h+1}(s_{h+1})
  MatrixXd gram_r;    // y y^T, y = varphi(s_h, a_h)
  VectorXd target_r;  // y r_h
};

StepIncrement make_increment(const VectorXd& transition_feature,
                             double transition_target,
                             const VectorXd& reward_feature, double reward);

class Regularizer {
 public:
  virtual ~Regularizer() = default;

  // Episode k (1-based) must be the next one; increments has one entry per
  // step.  Throws ProtocolError on an out-of-order episode and DomainError on
  // a wrong number of steps.
  virtual void ingest(int k, const std::vector<StepIncrement>& increments) = 0;
  // Statistics after episodes 1..k, i.e. those used in episode k + 1.
  // release(0) returns the regularization terms alone.
  virtual RegularizedStats release(int k) const = 0;
  virtual int ingested() const = 0;
  // Regularity constants matching this regularizer (beta fields unset).
  virtual ConfidenceParams confidence(double alpha) const = 0;
  virtual nlohmann::json metadata() const = 0;
};

// Shared machinery: four noisy prefix-sum trees per step and a diagonal
// shift.  With zero noise the released sums are the exact dyadic sums.
class TreeRegularizer : public Regularizer {
 public:
  struct Scales {
    double sigma_p1 = 0.0;
    double sigma_p2 = 0.0;
    double sigma_r1 = 0.0;
    double sigma_r2 = 0.0;
    double shift_p = 1.0;
    double shift_r = 1.0;
  };

  TreeRegularizer(int horizon, int d1, int d2, int num_episodes,
                  const Scales& scales, std::uint64_t noise_seed);

  void ingest(int k, const std::vector<StepIncrement>& increments) override;
  RegularizedStats release(int k) const override;
  int ingested() const override { return ingested_; }

  // Exact G and g after episodes 1..k (no regularization).
  RegularizedStats exact_sums(int k) const;
  // Z and z as released at k: Lambda - G and u - g.
  RegularizedStats regularization_terms(int k) const;

  const Scales& scales() const { return scales_; }
  const NoisyPSumTree& tree_gram_p(int h) const { return steps_.at(h).gram_p; }
  const NoisyPSumTree& tree_target_p(int h) const { return steps_.at(h).target_p; }
  const NoisyPSumTree& tree_gram_r(int h) const { return steps_.at(h).gram_r; }
  const NoisyPSumTree& tree_target_r(int h) const { return steps_.at(h).target_r; }

 protected:
  int horizon() const { return static_cast<int>(steps_.size()); }

 private:
  struct StepTrees {
    NoisyPSumTree gram_p;
    NoisyPSumTree target_p;
    NoisyPSumTree gram_r;
    NoisyPSumTree target_r;
  };
  void CheckRelease(int k) const;

  Scales scales_;
  std::vector<StepTrees> steps_;
  int ingested_ = 0;
  std::mt19937_64 rng_;
};

// Z = lambda I, z = 0 for every episode and step.
class FixedRidge : public TreeRegularizer {
 public:
  FixedRidge(double lambda, int horizon, int d1, int d2, int num_episodes);

  double lambda() const { return lambda_; }
  ConfidenceParams confidence(double alpha) const override;
  nlohmann::json metadata() const override;

 private:
  double lambda_;
};

// Tree-based Gaussian privatizer.  Matrix streams are shifted by
// 2 Sigma I; when the calibration carries no noise the shift falls back to
// `zero_noise_floor` so the released matrices stay positive definite.
class Privatizer : public TreeRegularizer {
 public:
  Privatizer(const NoiseCalibration& calibration, int horizon, int d1, int d2,
             int num_episodes, std::uint64_t noise_seed,
             double zero_noise_floor = 1.0);

  // All noise scales zero; releases G + floor I and g.
  static std::unique_ptr<Privatizer> ZeroNoise(int horizon, int d1, int d2,
                                               int num_episodes,
                                               std::uint64_t noise_seed,
                                               double floor = 1.0);

  const NoiseCalibration& calibration() const { return calibration_; }
  bool zero_noise() const { return zero_noise_; }
  ConfidenceParams confidence(double alpha) const override;
  nlohmann::json metadata() const override;

 private:
  static Scales ScalesFor(const NoiseCalibration& cal, double floor);

  NoiseCalibration calibration_;
  bool zero_noise_;
  double floor_;
};

// Seed for the privatizer's own generator, distinct from the sampling
// generator seeded with `run_seed`.
std::uint64_t noise_seed_for(std::uint64_t run_seed);

}  // namespace dpmix

#endif  // DPMIX_REGULARIZER_H_
