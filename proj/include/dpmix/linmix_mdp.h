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

// Ground-truth linear mixture MDPs over finite state/action spaces, plus the
// exact dynamic-programming oracles used for regret measurement.
//
// Steps are 0-based throughout the C++ API: step h in [0, H) corresponds to
// step h + 1 of the usual 1-based episodic notation, and the truncation
// ceiling H - h + 1 becomes horizon() - h.

#ifndef DPMIX_LINMIX_MDP_H_
#define DPMIX_LINMIX_MDP_H_

#include <cstdint>
#include <random>
#include <vector>

#include <Eigen/Dense>

namespace dpmix {

using Eigen::MatrixXd;
using Eigen::VectorXd;

// A finite linear mixture MDP: P_h(s'|s,a) = <psi(s,a,s'), theta_p[h]> and
// r_h(s,a) = <varphi(s,a), theta_r[h]>.  Immutable after construction.
class LinearMixtureMDP {
 public:
  // `psi` has S*A*S rows of length d1, row (s*A + a)*S + s2.
  // `varphi` has S*A rows of length d2, row s*A + a.
  // Throws DomainError if the parameters do not describe a valid MDP.
  LinearMixtureMDP(int num_states, int num_actions, int horizon, MatrixXd psi,
                   MatrixXd varphi, std::vector<VectorXd> theta_p,
                   std::vector<VectorXd> theta_r, int initial_state = 0);

  int num_states() const { return num_states_; }
  int num_actions() const { return num_actions_; }
  int horizon() const { return horizon_; }
  int d1() const { return static_cast<int>(psi_.cols()); }
  int d2() const { return static_cast<int>(varphi_.cols()); }
  int initial_state() const { return initial_state_; }

  const MatrixXd& psi() const { return psi_; }
  const MatrixXd& varphi() const { return varphi_; }
  const VectorXd& theta_p(int h) const;
  const VectorXd& theta_r(int h) const;

  auto psi_row(int s, int a, int s2) const {
    return psi_.row((static_cast<Eigen::Index>(s) * num_actions_ + a) * num_states_ + s2);
  }
  auto varphi_row(int s, int a) const {
    return varphi_.row(static_cast<Eigen::Index>(s) * num_actions_ + a);
  }

  double transition_prob(int h, int s, int a, int s2) const;
  double mean_reward(int h, int s, int a) const;

  // Row s*A + a holds P_h(.|s,a); cached at construction.
  const MatrixXd& transition_table(int h) const { return transitions_.at(h); }
  // S x A table of mean rewards r_h(s,a).
  const MatrixXd& reward_table(int h) const { return rewards_.at(h); }

 private:
  void CheckStep(int h) const;
  void CheckStateAction(int s, int a) const;
  void Validate() const;

  int num_states_;
  int num_actions_;
  int horizon_;
  MatrixXd psi_;
  MatrixXd varphi_;
  std::vector<VectorXd> theta_p_;
  std::vector<VectorXd> theta_r_;
  int initial_state_;
  std::vector<MatrixXd> transitions_;
  std::vector<MatrixXd> rewards_;
};

// Tabular MDP tables, one entry per step.  transitions[h] is (S*A) x S with
// row s*A + a holding P_h(.|s,a); rewards[h] is S x A.
struct TabularTables {
  std::vector<MatrixXd> transitions;
  std::vector<MatrixXd> rewards;
};

// Embeds a tabular MDP as a linear mixture MDP with one-hot features:
// d1 = S*S*A and d2 = S*A.
LinearMixtureMDP make_tabular_mixture(int num_states, int num_actions,
                                      const TabularTables& tables,
                                      int initial_state = 0);

// phi(s,a) = sum_{s'} psi(s,a,s') V(s'), returned as an (S*A) x d1 matrix with
// row s*A + a.  V must lie in [0, H].
MatrixXd compute_phi(const LinearMixtureMDP& mdp, const VectorXd& value);

// Per-step action distributions: probs(h) is S x A, rows on the simplex.
class Policy {
 public:
  Policy() = default;
  explicit Policy(std::vector<MatrixXd> probs) : probs_(std::move(probs)) {}

  static Policy Uniform(int num_states, int num_actions, int horizon);
  // actions[h][s] is the action taken with probability one.
  static Policy Deterministic(const std::vector<std::vector<int>>& actions,
                              int num_actions);

  int horizon() const { return static_cast<int>(probs_.size()); }
  const MatrixXd& probs(int h) const { return probs_.at(h); }
  MatrixXd& mutable_probs(int h) { return probs_.at(h); }

  // Throws DomainError unless every row is non-negative and sums to one
  // within 1e-12, with shapes matching `mdp`.
  void Validate(const LinearMixtureMDP& mdp) const;

 private:
  std::vector<MatrixXd> probs_;
};

struct Step {
  int state;
  int action;
  double reward;
  int next_state;
};

struct Trajectory {
  std::vector<Step> steps;
};

// Rolls out one episode from the initial state.  Rewards are Bernoulli with
// the MDP's mean reward.
Trajectory sample_trajectory(const LinearMixtureMDP& mdp, const Policy& policy,
                             std::mt19937_64& rng);

// Draws an index from a probability row.
int sample_categorical(const Eigen::Ref<const Eigen::RowVectorXd>& probs,
                       std::mt19937_64& rng);

struct OptimalValues {
  std::vector<VectorXd> v;  // H + 1 entries, v[H] == 0
  std::vector<MatrixXd> q;  // H entries, S x A
};

OptimalValues exact_optimal_values(const LinearMixtureMDP& mdp);

// Greedy policy from per-step Q tables, ties broken by lowest action index.
Policy greedy_policy(const std::vector<MatrixXd>& q);

// Index of the largest entry of a row, lowest index on ties.
int argmax_lowest(const Eigen::Ref<const Eigen::RowVectorXd>& row);

// V^pi per step by backward induction; H + 1 entries with the last zero.
std::vector<VectorXd> policy_value(const LinearMixtureMDP& mdp,
                                   const Policy& policy);

}  // namespace dpmix

#endif  // DPMIX_LINMIX_MDP_H_
