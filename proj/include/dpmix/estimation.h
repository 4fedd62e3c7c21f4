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

// Regularized least-squares estimators, confidence widths and exploration
// bonuses for the transition and reward regressions.

#ifndef DPMIX_ESTIMATION_H_
#define DPMIX_ESTIMATION_H_

#include <vector>

#include <Eigen/Dense>

namespace dpmix {

using Eigen::MatrixXd;
using Eigen::VectorXd;

// Per-step Gram matrices and target vectors as released by a regularizer.
struct RegularizedStats {
  std::vector<MatrixXd> lambda_p;
  std::vector<VectorXd> u_p;
  std::vector<MatrixXd> lambda_r;
  std::vector<VectorXd> u_r;

  int horizon() const { return static_cast<int>(lambda_p.size()); }
};

// Confidence level, regularity constants of the regularizer, and the widths
// derived from them.  Use with_betas() to fill beta_p and beta_r.
struct ConfidenceParams {
  double alpha = 0.1;
  double lambda_min_p = 1.0;
  double lambda_max_p = 1.0;
  double lambda_min_r = 1.0;
  double lambda_max_r = 1.0;
  double nu_p = 0.0;
  double nu_r = 0.0;
  double beta_p = 0.0;
  double beta_r = 0.0;
};

// Width of the transition-parameter ellipsoid:
//   (H/2) sqrt(2 ln(H/alpha) + d1 ln(1 + K H^2 / lambda_min_p))
//     + sqrt(d1 lambda_max_p) + nu_p.
double beta_p(const ConfidenceParams& cp, int d1, int num_episodes, int horizon);

// Width of the reward-parameter ellipsoid:
//   (1/2) sqrt(2 ln(H/alpha) + d2 ln(1 + K / (d2 lambda_min_r)))
//     + sqrt(d2 lambda_max_r) + nu_r.
double beta_r(const ConfidenceParams& cp, int d2, int num_episodes, int horizon);

// Copy of `cp` with both widths evaluated once for the whole run.
ConfidenceParams with_betas(ConfidenceParams cp, int d1, int d2,
                            int num_episodes, int horizon);

// Cholesky factorization of a symmetric positive definite matrix.  On failure
// it retries once with 1e-10 * trace/d added to the diagonal and throws
// SingularityError if that also fails.
class PdFactor {
 public:
  explicit PdFactor(const MatrixXd& lambda);

  VectorXd solve(const VectorXd& rhs) const;
  // x^T Lambda^{-1} x, clamped at zero.
  double inverse_quad_form(const VectorXd& x) const;
  bool jittered() const { return jittered_; }
  Eigen::Index dim() const { return llt_.rows(); }

 private:
  Eigen::LLT<MatrixXd> llt_;
  bool jittered_ = false;
};

// theta_hat = Lambda^{-1} u.
VectorXd solve_estimator(const MatrixXd& lambda, const VectorXd& u);

// beta * sqrt(x^T Lambda^{-1} x).
double bonus(const VectorXd& feature, const MatrixXd& lambda, double beta);
double bonus(const VectorXd& feature, const PdFactor& lambda, double beta);

// ||x||_M = sqrt(x^T M x) for symmetric positive semi-definite M.
double weighted_norm(const VectorXd& x, const MatrixXd& m);

}  // namespace dpmix

#endif  // DPMIX_ESTIMATION_H_
