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

// Optimistic value iteration and optimistic policy optimization for linear
// mixture MDPs, both driven by a Regularizer.

#ifndef DPMIX_AGENTS_H_
#define DPMIX_AGENTS_H_

#include <functional>
#include <random>
#include <vector>

#include "dpmix/estimation.h"
#include "dpmix/linmix_mdp.h"
#include "dpmix/regularizer.h"

namespace dpmix {

struct ValueEstimates {
  std::vector<MatrixXd> q;            // H entries, S x A, in [0, H - h]
  std::vector<VectorXd> v;            // H + 1 entries, v[H] == 0
  std::vector<MatrixXd> phi;          // H entries, phi_h from v[h + 1]
  std::vector<VectorXd> theta_p_hat;  // H entries
  std::vector<VectorXd> theta_r_hat;  // H entries
};

enum class BackupMode { kGreedy, kExpectation };

// Q_h(s,a) = clip(varphi^T theta_r + phi_h^T theta_p + bonus_p + bonus_r,
//                 0, H - h) for one step, given the next-step values.
MatrixXd optimistic_q(const LinearMixtureMDP& mdp, int h, const MatrixXd& phi,
                      const VectorXd& theta_p_hat, const VectorXd& theta_r_hat,
                      const PdFactor& lambda_p, const PdFactor& lambda_r,
                      double beta_p, double beta_r);

// The shared inner loop over h = H-1, ..., 0.  Only the MDP's feature maps
// are read.  kExpectation requires a policy.
ValueEstimates backward_pass(const LinearMixtureMDP& mdp,
                             const RegularizedStats& stats,
                             const ConfidenceParams& cp, BackupMode mode,
                             const Policy* policy = nullptr);

struct RegretLog {
  std::vector<double> inst;          // V*_1(s_1) - V^{pi^k}_1(s_1)
  std::vector<double> cum;
  std::vector<double> wall_seconds;  // elapsed since the run started

  int episodes() const { return static_cast<int>(inst.size()); }
};

// Called once per episode, after the backward pass and before the rollout.
// `k` is 1-based; `policy` is the policy executed in episode k.
using EpisodeObserver =
    std::function<void(int k, const RegularizedStats& stats,
                       const ValueEstimates& values, const Policy& policy)>;

// `cp` must carry beta_p and beta_r (see with_betas).
RegretLog run_vi(const LinearMixtureMDP& mdp, Regularizer& reg,
                 const ConfidenceParams& cp, int num_episodes,
                 std::mt19937_64& rng, const EpisodeObserver& observer = {});

struct POConfig {
  double eta;
};

// eta = sqrt(2 ln|A| / (H T)) with T = K H.
POConfig default_po_config(int num_actions, int horizon, int num_episodes);

// pi(.|s) <- pi(.|s) exp(eta Q(s,.)) / normalizer, for every row, in log
// space.  Throws NumericalError if a row cannot be normalized.
void exponential_weights_update(MatrixXd& probs, const MatrixXd& q, double eta);

RegretLog run_po(const LinearMixtureMDP& mdp, Regularizer& reg,
                 const ConfidenceParams& cp, const POConfig& po,
                 int num_episodes, std::mt19937_64& rng,
                 const EpisodeObserver& observer = {});

}  // namespace dpmix

#endif  // DPMIX_AGENTS_H_
