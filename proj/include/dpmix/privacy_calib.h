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

// Noise scales, sensitivities and regularity constants for the tree-based
// Gaussian privatizer.
//
// Each of the four per-step counters (transition Gram matrix, transition
// target vector, reward Gram matrix, reward target vector) is calibrated to
// (eps/4, delta/4) after replacing (eps, delta) by (eps/H, delta/H), giving
//   sigma = (H Delta / eps) sqrt(32 m ln(4H/delta))
// with m = ceil(log2 K) + 1 node memberships per episode.

#ifndef DPMIX_PRIVACY_CALIB_H_
#define DPMIX_PRIVACY_CALIB_H_

#include <json.hpp>

#include "dpmix/estimation.h"

namespace dpmix {

struct PrivacyBudget {
  double epsilon;
  double delta;
};

// Throws DomainError unless epsilon > 0 and 0 < delta <= 1.
void validate_budget(const PrivacyBudget& budget);

struct NoiseCalibration {
  int m = 1;
  double sigma_p1 = 0.0;
  double sigma_p2 = 0.0;
  double sigma_r1 = 0.0;
  double sigma_r2 = 0.0;
  double delta_p1 = 0.0;
  double delta_p2 = 0.0;
  double delta_r = 1.0;
  double shift_p = 0.0;  // Sigma_{p,1}: operator-norm bound on the matrix noise
  double shift_r = 0.0;  // Sigma_r
  double lambda_min_p = 0.0;
  double lambda_max_p = 0.0;
  double lambda_min_r = 0.0;
  double lambda_max_r = 0.0;
  double nu_p = 0.0;
  double nu_r = 0.0;
};

// Sensitivities and noise scales.  Delta_{p,1} = d1 H^2, Delta_{p,2} =
// sqrt(d1) H^2, Delta_r = 1.
NoiseCalibration calibrate_noise(const PrivacyBudget& budget, int num_episodes,
                                 int horizon, int d1, int d2);

// Fills the shift magnitudes and regularity constants:
//   Sigma = sigma_1 sqrt(m) (4 sqrt(d) + sqrt(8 ln(8KH/alpha)))
//   lambda_min = Sigma, lambda_max = 3 Sigma
//   nu = sigma_2 sqrt(m / Sigma) (sqrt(d) + sqrt(2 ln(4KH/alpha)))
// With zero noise every constant is zero.
NoiseCalibration shift_magnitudes(NoiseCalibration cal, double alpha,
                                  int num_episodes, int horizon, int d1, int d2);

// Regularity constants in the form the estimators consume.
ConfidenceParams confidence_params(const NoiseCalibration& cal, double alpha);

// Fixed keys: m, sigma_*, Sigma_p1, Sigma_r, lambda_*, nu_*,
// per_counter_epsilon (= eps / 4H) and per_counter_delta (= delta / 4H), plus
// a "counters" array describing the four counters.
nlohmann::json accounting_report(const NoiseCalibration& cal,
                                 const PrivacyBudget& budget, int horizon);

}  // namespace dpmix

#endif  // DPMIX_PRIVACY_CALIB_H_
