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

#include "dpmix/linmix_mdp.h"

#include <cmath>
#include <string>

#include "dpmix/errors.h"

namespace dpmix {
namespace {

constexpr double kProbTolerance = 1e-12;
constexpr double kRowSumTolerance = 1e-9;
constexpr int kMaxEnumeratedStates = 20;

std::string Where(int h, int s, int a) {
  return "(h=" + std::to_string(h) + ", s=" + std::to_string(s) +
         ", a=" + std::to_string(a) + ")";
}

}  // namespace

LinearMixtureMDP::LinearMixtureMDP(int num_states, int num_actions, int horizon,
                                   MatrixXd psi, MatrixXd varphi,
                                   std::vector<VectorXd> theta_p,
                                   std::vector<VectorXd> theta_r,
                                   int initial_state)
    : num_states_(num_states),
      num_actions_(num_actions),
      horizon_(horizon),
      psi_(std::move(psi)),
      varphi_(std::move(varphi)),
      theta_p_(std::move(theta_p)),
      theta_r_(std::move(theta_r)),
      initial_state_(initial_state) {
  if (num_states_ < 1 || num_actions_ < 1 || horizon_ < 1) {
    throw DomainError("S, A and H must be positive");
  }
  if (initial_state_ < 0 || initial_state_ >= num_states_) {
    throw DomainError("initial state out of range");
  }
  const Eigen::Index sa = static_cast<Eigen::Index>(num_states_) * num_actions_;
  if (psi_.rows() != sa * num_states_ || psi_.cols() < 1) {
    throw DomainError("psi must have S*A*S rows and at least one column");
  }
  if (varphi_.rows() != sa || varphi_.cols() < 1) {
    throw DomainError("varphi must have S*A rows and at least one column");
  }
  if (static_cast<int>(theta_p_.size()) != horizon_ ||
      static_cast<int>(theta_r_.size()) != horizon_) {
    throw DomainError("need one theta_p and one theta_r per step");
  }
  for (int h = 0; h < horizon_; ++h) {
    if (theta_p_[h].size() != psi_.cols() || theta_r_[h].size() != varphi_.cols()) {
      throw DomainError("theta dimension mismatch at step " + std::to_string(h));
    }
  }

  transitions_.reserve(horizon_);
  rewards_.reserve(horizon_);
  for (int h = 0; h < horizon_; ++h) {
    VectorXd flat = psi_ * theta_p_[h];
    transitions_.emplace_back(
        Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic,
                                       Eigen::RowMajor>>(flat.data(), sa,
                                                         num_states_));
    VectorXd r = varphi_ * theta_r_[h];
    rewards_.emplace_back(
        Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic,
                                       Eigen::RowMajor>>(r.data(), num_states_,
                                                         num_actions_));
  }
  Validate();
}

void LinearMixtureMDP::Validate() const {
  const double sqrt_d1 = std::sqrt(static_cast<double>(d1()));
  const double sqrt_d2 = std::sqrt(static_cast<double>(d2()));
  for (int h = 0; h < horizon_; ++h) {
    if (theta_p_[h].norm() > sqrt_d1 * (1 + 1e-12)) {
      throw DomainError("||theta_p|| exceeds sqrt(d1) at step " + std::to_string(h));
    }
    if (theta_r_[h].norm() > sqrt_d2 * (1 + 1e-12)) {
      throw DomainError("||theta_r|| exceeds sqrt(d2) at step " + std::to_string(h));
    }
    const MatrixXd& p = transitions_[h];
    const MatrixXd& r = rewards_[h];
    for (int s = 0; s < num_states_; ++s) {
      for (int a = 0; a < num_actions_; ++a) {
        auto row = p.row(static_cast<Eigen::Index>(s) * num_actions_ + a);
        if (row.minCoeff() < -kProbTolerance || row.maxCoeff() > 1 + kProbTolerance) {
          throw DomainError("transition probability outside [0,1] at " + Where(h, s, a));
        }
        if (std::abs(row.sum() - 1.0) > kRowSumTolerance) {
          throw DomainError("transition row does not sum to one at " + Where(h, s, a));
        }
        if (r(s, a) < -kProbTolerance || r(s, a) > 1 + kProbTolerance) {
          throw DomainError("mean reward outside [0,1] at " + Where(h, s, a));
        }
      }
    }
  }
  for (Eigen::Index i = 0; i < varphi_.rows(); ++i) {
    if (varphi_.row(i).norm() > 1 + 1e-12) {
      throw DomainError("||varphi(s,a)|| exceeds one");
    }
  }

  // ||sum_{s'} psi(s,a,s') V(s')|| <= sqrt(d1) H over V in [0,H]^S.  The norm
  // is convex in V, so the maximum sits on a vertex of the cube.
  const double bound = sqrt_d1 * horizon_ * (1 + 1e-12);
  for (int s = 0; s < num_states_; ++s) {
    for (int a = 0; a < num_actions_; ++a) {
      double triangle = 0.0;
      for (int s2 = 0; s2 < num_states_; ++s2) triangle += psi_row(s, a, s2).norm();
      if (triangle * horizon_ <= bound) continue;
      if (num_states_ > kMaxEnumeratedStates) {
        throw DomainError("cannot certify the phi norm bound for large S");
      }
      for (std::uint64_t mask = 1; mask < (std::uint64_t{1} << num_states_); ++mask) {
        Eigen::RowVectorXd acc = Eigen::RowVectorXd::Zero(d1());
        for (int s2 = 0; s2 < num_states_; ++s2) {
          if (mask & (std::uint64_t{1} << s2)) acc += psi_row(s, a, s2);
        }
        if (acc.norm() * horizon_ > bound) {
          throw DomainError("||phi(s,a)|| can exceed sqrt(d1) H at " + Where(-1, s, a));
        }
      }
    }
  }
}

const VectorXd& LinearMixtureMDP::theta_p(int h) const {
  CheckStep(h);
  return theta_p_[h];
}

const VectorXd& LinearMixtureMDP::theta_r(int h) const {
  CheckStep(h);
  return theta_r_[h];
}

void LinearMixtureMDP::CheckStep(int h) const {
  if (h < 0 || h >= horizon_) throw IndexError("step out of range: " + std::to_string(h));
}

void LinearMixtureMDP::CheckStateAction(int s, int a) const {
  if (s < 0 || s >= num_states_) throw IndexError("state out of range: " + std::to_string(s));
  if (a < 0 || a >= num_actions_) throw IndexError("action out of range: " + std::to_string(a));
}

double LinearMixtureMDP::transition_prob(int h, int s, int a, int s2) const {
  CheckStep(h);
  CheckStateAction(s, a);
  if (s2 < 0 || s2 >= num_states_) throw IndexError("state out of range: " + std::to_string(s2));
  return psi_row(s, a, s2).dot(theta_p_[h]);
}

double LinearMixtureMDP::mean_reward(int h, int s, int a) const {
  CheckStep(h);
  CheckStateAction(s, a);
  return varphi_row(s, a).dot(theta_r_[h]);
}

LinearMixtureMDP make_tabular_mixture(int num_states, int num_actions,
                                      const TabularTables& tables,
                                      int initial_state) {
  const int horizon = static_cast<int>(tables.transitions.size());
  if (horizon < 1 || static_cast<int>(tables.rewards.size()) != horizon) {
    throw DomainError("need matching, non-empty transition and reward tables");
  }
  const int sa = num_states * num_actions;
  const int d1 = sa * num_states;
  std::vector<VectorXd> theta_p;
  std::vector<VectorXd> theta_r;
  for (int h = 0; h < horizon; ++h) {
    const MatrixXd& p = tables.transitions[h];
    const MatrixXd& r = tables.rewards[h];
    if (p.rows() != sa || p.cols() != num_states || r.rows() != num_states ||
        r.cols() != num_actions) {
      throw DomainError("table shape mismatch at step " + std::to_string(h));
    }
    VectorXd tp(d1);
    for (int row = 0; row < sa; ++row) {
      for (int s2 = 0; s2 < num_states; ++s2) tp(row * num_states + s2) = p(row, s2);
    }
    VectorXd tr(sa);
    for (int s = 0; s < num_states; ++s) {
      for (int a = 0; a < num_actions; ++a) tr(s * num_actions + a) = r(s, a);
    }
    theta_p.push_back(std::move(tp));
    theta_r.push_back(std::move(tr));
  }
  return LinearMixtureMDP(num_states, num_actions, horizon,
                          MatrixXd::Identity(d1, d1), MatrixXd::Identity(sa, sa),
                          std::move(theta_p), std::move(theta_r), initial_state);
}

MatrixXd compute_phi(const LinearMixtureMDP& mdp, const VectorXd& value) {
  const int num_states = mdp.num_states();
  const int num_actions = mdp.num_actions();
  if (value.size() != num_states) throw DomainError("value vector has wrong length");
  const double h = mdp.horizon();
  for (int s = 0; s < num_states; ++s) {
    if (!(value(s) >= 0.0 && value(s) <= h)) {
      throw DomainError("value entry outside [0, H] at state " + std::to_string(s));
    }
  }
  MatrixXd phi = MatrixXd::Zero(static_cast<Eigen::Index>(num_states) * num_actions, mdp.d1());
  for (int s = 0; s < num_states; ++s) {
    for (int a = 0; a < num_actions; ++a) {
      auto out = phi.row(static_cast<Eigen::Index>(s) * num_actions + a);
      for (int s2 = 0; s2 < num_states; ++s2) {
        if (value(s2) != 0.0) out += value(s2) * mdp.psi_row(s, a, s2);
      }
    }
  }
  return phi;
}

Policy Policy::Uniform(int num_states, int num_actions, int horizon) {
  return Policy(std::vector<MatrixXd>(
      horizon, MatrixXd::Constant(num_states, num_actions, 1.0 / num_actions)));
}

Policy Policy::Deterministic(const std::vector<std::vector<int>>& actions,
                             int num_actions) {
  std::vector<MatrixXd> probs;
  for (const auto& step : actions) {
    MatrixXd p = MatrixXd::Zero(static_cast<Eigen::Index>(step.size()), num_actions);
    for (std::size_t s = 0; s < step.size(); ++s) {
      if (step[s] < 0 || step[s] >= num_actions) throw IndexError("action out of range");
      p(static_cast<Eigen::Index>(s), step[s]) = 1.0;
    }
    probs.push_back(std::move(p));
  }
  return Policy(std::move(probs));
}

void Policy::Validate(const LinearMixtureMDP& mdp) const {
  if (horizon() != mdp.horizon()) throw DomainError("policy horizon mismatch");
  for (int h = 0; h < horizon(); ++h) {
    const MatrixXd& p = probs_[h];
    if (p.rows() != mdp.num_states() || p.cols() != mdp.num_actions()) {
      throw DomainError("policy shape mismatch at step " + std::to_string(h));
    }
    for (Eigen::Index s = 0; s < p.rows(); ++s) {
      if (!(p.row(s).minCoeff() >= 0.0) || std::abs(p.row(s).sum() - 1.0) > 1e-12) {
        throw DomainError("policy row is not a distribution at step " +
                          std::to_string(h) + ", state " + std::to_string(s));
      }
    }
  }
}

int sample_categorical(const Eigen::Ref<const Eigen::RowVectorXd>& probs,
                       std::mt19937_64& rng) {
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  const double u = unif(rng);
  double acc = 0.0;
  int last_positive = 0;
  for (Eigen::Index i = 0; i < probs.size(); ++i) {
    if (probs(i) <= 0.0) continue;
    acc += probs(i);
    last_positive = static_cast<int>(i);
    if (u < acc) return last_positive;
  }
  // Round-off left u above the accumulated mass.
  return last_positive;
}

Trajectory sample_trajectory(const LinearMixtureMDP& mdp, const Policy& policy,
                             std::mt19937_64& rng) {
  Trajectory traj;
  traj.steps.reserve(mdp.horizon());
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  int state = mdp.initial_state();
  for (int h = 0; h < mdp.horizon(); ++h) {
    const int action = sample_categorical(policy.probs(h).row(state), rng);
    const double mean = mdp.reward_table(h)(state, action);
    const double reward = unif(rng) < mean ? 1.0 : 0.0;
    const int next = sample_categorical(
        mdp.transition_table(h).row(static_cast<Eigen::Index>(state) * mdp.num_actions() + action),
        rng);
    traj.steps.push_back({state, action, reward, next});
    state = next;
  }
  return traj;
}

int argmax_lowest(const Eigen::Ref<const Eigen::RowVectorXd>& row) {
  int best = 0;
  for (Eigen::Index a = 1; a < row.size(); ++a) {
    if (row(a) > row(best)) best = static_cast<int>(a);
  }
  return best;
}

namespace {

// Q_h(s,a) = r_h(s,a) + sum_{s'} P_h(s'|s,a) next(s').
MatrixXd BellmanBackup(const LinearMixtureMDP& mdp, int h, const VectorXd& next) {
  VectorXd expected = mdp.transition_table(h) * next;
  MatrixXd q = mdp.reward_table(h);
  for (int s = 0; s < mdp.num_states(); ++s) {
    for (int a = 0; a < mdp.num_actions(); ++a) {
      q(s, a) += expected(static_cast<Eigen::Index>(s) * mdp.num_actions() + a);
    }
  }
  return q;
}

}  // namespace

OptimalValues exact_optimal_values(const LinearMixtureMDP& mdp) {
  const int horizon = mdp.horizon();
  OptimalValues out;
  out.v.assign(horizon + 1, VectorXd::Zero(mdp.num_states()));
  out.q.assign(horizon, MatrixXd());
  for (int h = horizon - 1; h >= 0; --h) {
    out.q[h] = BellmanBackup(mdp, h, out.v[h + 1]);
    for (int s = 0; s < mdp.num_states(); ++s) {
      out.v[h](s) = out.q[h](s, argmax_lowest(out.q[h].row(s)));
    }
  }
  return out;
}

Policy greedy_policy(const std::vector<MatrixXd>& q) {
  std::vector<MatrixXd> probs;
  probs.reserve(q.size());
  for (const MatrixXd& qh : q) {
    MatrixXd p = MatrixXd::Zero(qh.rows(), qh.cols());
    for (Eigen::Index s = 0; s < qh.rows(); ++s) p(s, argmax_lowest(qh.row(s))) = 1.0;
    probs.push_back(std::move(p));
  }
  return Policy(std::move(probs));
}

std::vector<VectorXd> policy_value(const LinearMixtureMDP& mdp,
                                   const Policy& policy) {
  policy.Validate(mdp);
  const int horizon = mdp.horizon();
  std::vector<VectorXd> v(horizon + 1, VectorXd::Zero(mdp.num_states()));
  for (int h = horizon - 1; h >= 0; --h) {
    const MatrixXd q = BellmanBackup(mdp, h, v[h + 1]);
    v[h] = q.cwiseProduct(policy.probs(h)).rowwise().sum();
  }
  return v;
}

}  // namespace dpmix
