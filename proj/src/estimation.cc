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

#include "dpmix/estimation.h"

#include <algorithm>
#include <cmath>

#include "dpmix/errors.h"

namespace dpmix {
namespace {

constexpr double kJitterScale = 1e-10;

void CheckWidthInputs(double alpha, double lambda_min, double lambda_max,
                      double nu, int d, int num_episodes, int horizon) {
  if (!(lambda_min > 0.0)) throw DomainError("lambda_min must be positive");
  if (!(alpha > 0.0 && alpha <= 1.0)) throw DomainError("alpha must lie in (0, 1]");
  if (!(lambda_max >= 0.0) || !(nu >= 0.0)) {
    throw DomainError("lambda_max and nu must be non-negative");
  }
  if (d < 1 || num_episodes < 0 || horizon < 1) {
    throw DomainError("dimension and horizon must be positive, K non-negative");
  }
}

}  // namespace

double beta_p(const ConfidenceParams& cp, int d1, int num_episodes, int horizon) {
  CheckWidthInputs(cp.alpha, cp.lambda_min_p, cp.lambda_max_p, cp.nu_p, d1,
                   num_episodes, horizon);
  const double h = horizon;
  const double log_term =
      2.0 * std::log(h / cp.alpha) +
      d1 * std::log1p(static_cast<double>(num_episodes) * h * h / cp.lambda_min_p);
  return 0.5 * h * std::sqrt(log_term) + std::sqrt(d1 * cp.lambda_max_p) + cp.nu_p;
}

double beta_r(const ConfidenceParams& cp, int d2, int num_episodes, int horizon) {
  CheckWidthInputs(cp.alpha, cp.lambda_min_r, cp.lambda_max_r, cp.nu_r, d2,
                   num_episodes, horizon);
  const double log_term =
      2.0 * std::log(horizon / cp.alpha) +
      d2 * std::log1p(static_cast<double>(num_episodes) / (d2 * cp.lambda_min_r));
  return 0.5 * std::sqrt(log_term) + std::sqrt(d2 * cp.lambda_max_r) + cp.nu_r;
}

ConfidenceParams with_betas(ConfidenceParams cp, int d1, int d2,
                            int num_episodes, int horizon) {
  cp.beta_p = beta_p(cp, d1, num_episodes, horizon);
  cp.beta_r = beta_r(cp, d2, num_episodes, horizon);
  return cp;
}

PdFactor::PdFactor(const MatrixXd& lambda) {
  if (lambda.rows() != lambda.cols() || lambda.rows() == 0) {
    throw SingularityError("expected a non-empty square matrix");
  }
  if (!lambda.allFinite()) throw SingularityError("matrix has non-finite entries");
  llt_.compute(lambda);
  if (llt_.info() == Eigen::Success) return;
  const double jitter = kJitterScale * lambda.trace() / static_cast<double>(lambda.rows());
  if (jitter > 0.0 && std::isfinite(jitter)) {
    MatrixXd shifted = lambda;
    shifted.diagonal().array() += jitter;
    llt_.compute(shifted);
    jittered_ = true;
    if (llt_.info() == Eigen::Success) return;
  }
  throw SingularityError("matrix is not positive definite");
}

VectorXd PdFactor::solve(const VectorXd& rhs) const {
  if (rhs.size() != llt_.rows()) throw DomainError("right-hand side has wrong length");
  return llt_.solve(rhs);
}

double PdFactor::inverse_quad_form(const VectorXd& x) const {
  if (x.size() != llt_.rows()) throw DomainError("feature has wrong length");
  // ||L^{-1} x||^2 with Lambda = L L^T.
  const VectorXd half = llt_.matrixL().solve(x);
  return std::max(0.0, half.squaredNorm());
}

VectorXd solve_estimator(const MatrixXd& lambda, const VectorXd& u) {
  return PdFactor(lambda).solve(u);
}

double bonus(const VectorXd& feature, const PdFactor& lambda, double beta) {
  if (!(beta >= 0.0)) throw DomainError("beta must be non-negative");
  return beta * std::sqrt(lambda.inverse_quad_form(feature));
}

double bonus(const VectorXd& feature, const MatrixXd& lambda, double beta) {
  return bonus(feature, PdFactor(lambda), beta);
}

double weighted_norm(const VectorXd& x, const MatrixXd& m) {
  return std::sqrt(std::max(0.0, x.dot(m * x)));
}

}  // namespace dpmix
