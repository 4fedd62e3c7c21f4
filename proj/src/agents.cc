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

#include "dpmix/agents.h"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <string>

#include "dpmix/errors.h"

namespace dpmix {

MatrixXd optimistic_q(const LinearMixtureMDP& mdp, int h, const MatrixXd& phi,
                      const VectorXd& theta_p_hat, const VectorXd& theta_r_hat,
                      const PdFactor& lambda_p, const PdFactor& lambda_r,
                      double beta_p, double beta_r) {
  const int num_states = mdp.num_states();
  const int num_actions = mdp.num_actions();
  const double ceiling = mdp.horizon() - h;
  MatrixXd q(num_states, num_actions);
  for (int s = 0; s < num_states; ++s) {
    for (int a = 0; a < num_actions; ++a) {
      const Eigen::Index row = static_cast<Eigen::Index>(s) * num_actions + a;
      const VectorXd x = phi.row(row).transpose();
      const VectorXd y = mdp.varphi_row(s, a).transpose();
      const double estimate = y.dot(theta_r_hat) + x.dot(theta_p_hat);
      const double widths = bonus(x, lambda_p, beta_p) + bonus(y, lambda_r, beta_r);
      q(s, a) = std::max(0.0, std::min(ceiling, estimate + widths));
    }
  }
  return q;
}

ValueEstimates backward_pass(const LinearMixtureMDP& mdp,
                             const RegularizedStats& stats,
                             const ConfidenceParams& cp, BackupMode mode,
                             const Policy* policy) {
  const int horizon = mdp.horizon();
  if (stats.horizon() != horizon) throw DomainError("stats horizon mismatch");
  if (mode == BackupMode::kExpectation && policy == nullptr) {
    throw DomainError("expectation backup needs a policy");
  }
  ValueEstimates out;
  out.q.resize(horizon);
  out.v.assign(horizon + 1, VectorXd::Zero(mdp.num_states()));
  out.phi.resize(horizon);
  out.theta_p_hat.resize(horizon);
  out.theta_r_hat.resize(horizon);
  for (int h = horizon - 1; h >= 0; --h) {
    const PdFactor lambda_p(stats.lambda_p[h]);
    const PdFactor lambda_r(stats.lambda_r[h]);
    out.theta_p_hat[h] = lambda_p.solve(stats.u_p[h]);
    out.theta_r_hat[h] = lambda_r.solve(stats.u_r[h]);
    out.phi[h] = compute_phi(mdp, out.v[h + 1]);
    out.q[h] = optimistic_q(mdp, h, out.phi[h], out.theta_p_hat[h],
                            out.theta_r_hat[h], lambda_p, lambda_r, cp.beta_p,
                            cp.beta_r);
    if (mode == BackupMode::kGreedy) {
      for (int s = 0; s < mdp.num_states(); ++s) {
        out.v[h](s) = out.q[h](s, argmax_lowest(out.q[h].row(s)));
      }
    } else {
      const VectorXd v = out.q[h].cwiseProduct(policy->probs(h)).rowwise().sum();
      // Row sums of a distribution may exceed one by an ulp.
      out.v[h] = v.cwiseMax(0.0).cwiseMin(static_cast<double>(horizon - h));
    }
  }
  return out;
}

POConfig default_po_config(int num_actions, int horizon, int num_episodes) {
  if (num_actions < 1 || horizon < 1 || num_episodes < 1) {
    throw DomainError("A, H and K must be positive");
  }
  const double total_steps = static_cast<double>(num_episodes) * horizon;
  return POConfig{std::sqrt(2.0 * std::log(static_cast<double>(num_actions)) /
                            (horizon * total_steps))};
}

void exponential_weights_update(MatrixXd& probs, const MatrixXd& q, double eta) {
  if (probs.rows() != q.rows() || probs.cols() != q.cols()) {
    throw DomainError("policy and Q shapes differ");
  }
  for (Eigen::Index s = 0; s < probs.rows(); ++s) {
    Eigen::RowVectorXd logits(probs.cols());
    for (Eigen::Index a = 0; a < probs.cols(); ++a) {
      logits(a) = probs(s, a) > 0.0 ? std::log(probs(s, a)) + eta * q(s, a)
                                    : -std::numeric_limits<double>::infinity();
    }
    const double top = logits.maxCoeff();
    if (!std::isfinite(top)) {
      throw NumericalError("policy row " + std::to_string(s) + " has no finite weight");
    }
    Eigen::RowVectorXd weights = (logits.array() - top).exp().matrix();
    const double total = weights.sum();
    if (!(total > 0.0) || !std::isfinite(total)) {
      throw NumericalError("policy row " + std::to_string(s) + " cannot be normalized");
    }
    probs.row(s) = weights / total;
  }
}

namespace {

std::vector<StepIncrement> EpisodeIncrements(const LinearMixtureMDP& mdp,
                                             const ValueEstimates& values,
                                             const Trajectory& traj) {
  std::vector<StepIncrement> out;
  out.reserve(traj.steps.size());
  for (int h = 0; h < mdp.horizon(); ++h) {
    const Step& step = traj.steps[h];
    const Eigen::Index row =
        static_cast<Eigen::Index>(step.state) * mdp.num_actions() + step.action;
    out.push_back(make_increment(values.phi[h].row(row).transpose(),
                                 values.v[h + 1](step.next_state),
                                 mdp.varphi_row(step.state, step.action).transpose(),
                                 step.reward));
  }
  return out;
}

class RegretRecorder {
 public:
  RegretRecorder(const LinearMixtureMDP& mdp, int num_episodes)
      : mdp_(mdp),
        optimal_(exact_optimal_values(mdp).v[0](mdp.initial_state())),
        start_(std::chrono::steady_clock::now()) {
    log_.inst.reserve(num_episodes);
    log_.cum.reserve(num_episodes);
    log_.wall_seconds.reserve(num_episodes);
  }

  void Record(const Policy& policy) {
    const double achieved = policy_value(mdp_, policy)[0](mdp_.initial_state());
    const double gap = optimal_ - achieved;
    log_.inst.push_back(gap);
    log_.cum.push_back((log_.cum.empty() ? 0.0 : log_.cum.back()) + gap);
    log_.wall_seconds.push_back(
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count());
  }

  RegretLog Take() { return std::move(log_); }

 private:
  const LinearMixtureMDP& mdp_;
  double optimal_;
  std::chrono::steady_clock::time_point start_;
  RegretLog log_;
};

template <typename Body>
void RunEpisode(int k, Body&& body) {
  try {
    body();
  } catch (const EpisodeError&) {
    throw;
  } catch (const std::exception& e) {
    throw EpisodeError(k, e.what());
  }
}

void CheckRunArgs(const Regularizer& reg, int num_episodes) {
  if (num_episodes < 1) throw DomainError("K must be positive");
  if (reg.ingested() != 0) throw ProtocolError("regularizer already holds episodes");
}

}  // namespace

RegretLog run_vi(const LinearMixtureMDP& mdp, Regularizer& reg,
                 const ConfidenceParams& cp, int num_episodes,
                 std::mt19937_64& rng, const EpisodeObserver& observer) {
  CheckRunArgs(reg, num_episodes);
  RegretRecorder recorder(mdp, num_episodes);
  for (int k = 1; k <= num_episodes; ++k) {
    RunEpisode(k, [&] {
      const RegularizedStats stats = reg.release(k - 1);
      const ValueEstimates values = backward_pass(mdp, stats, cp, BackupMode::kGreedy);
      const Policy policy = greedy_policy(values.q);
      if (observer) observer(k, stats, values, policy);
      const Trajectory traj = sample_trajectory(mdp, policy, rng);
      reg.ingest(k, EpisodeIncrements(mdp, values, traj));
      recorder.Record(policy);
    });
  }
  return recorder.Take();
}

RegretLog run_po(const LinearMixtureMDP& mdp, Regularizer& reg,
                 const ConfidenceParams& cp, const POConfig& po,
                 int num_episodes, std::mt19937_64& rng,
                 const EpisodeObserver& observer) {
  CheckRunArgs(reg, num_episodes);
  if (!(po.eta >= 0.0) || !std::isfinite(po.eta)) throw DomainError("eta must be non-negative");
  RegretRecorder recorder(mdp, num_episodes);
  Policy policy = Policy::Uniform(mdp.num_states(), mdp.num_actions(), mdp.horizon());
  for (int k = 1; k <= num_episodes; ++k) {
    RunEpisode(k, [&] {
      const RegularizedStats stats = reg.release(k - 1);
      const ValueEstimates values =
          backward_pass(mdp, stats, cp, BackupMode::kExpectation, &policy);
      if (observer) observer(k, stats, values, policy);
      const Trajectory traj = sample_trajectory(mdp, policy, rng);
      reg.ingest(k, EpisodeIncrements(mdp, values, traj));
      recorder.Record(policy);
      for (int h = 0; h < mdp.horizon(); ++h) {
        exponential_weights_update(policy.mutable_probs(h), values.q[h], po.eta);
      }
    });
  }
  return recorder.Take();
}

}  // namespace dpmix
