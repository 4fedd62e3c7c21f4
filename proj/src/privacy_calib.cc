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

#include "dpmix/privacy_calib.h"

#include <cmath>

#include "dpmix/errors.h"
#include "dpmix/tree_counter.h"

namespace dpmix {

void validate_budget(const PrivacyBudget& budget) {
  if (!(budget.epsilon > 0.0) || !std::isfinite(budget.epsilon)) {
    throw DomainError("epsilon must be positive and finite");
  }
  if (!(budget.delta > 0.0 && budget.delta <= 1.0)) {
    throw DomainError("delta must lie in (0, 1]");
  }
}

NoiseCalibration calibrate_noise(const PrivacyBudget& budget, int num_episodes,
                                 int horizon, int d1, int d2) {
  validate_budget(budget);
  if (num_episodes < 1 || horizon < 1 || d1 < 1 || d2 < 1) {
    throw DomainError("K, H, d1 and d2 must be positive");
  }
  NoiseCalibration cal;
  cal.m = tree_membership_bound(num_episodes);
  const double h = horizon;
  cal.delta_p1 = d1 * h * h;
  cal.delta_p2 = std::sqrt(static_cast<double>(d1)) * h * h;
  cal.delta_r = 1.0;
  const double common = std::sqrt(32.0 * cal.m * std::log(4.0 * h / budget.delta));
  cal.sigma_p1 = h * cal.delta_p1 / budget.epsilon * common;
  cal.sigma_p2 = h * cal.delta_p2 / budget.epsilon * common;
  cal.sigma_r1 = h * cal.delta_r / budget.epsilon * common;
  cal.sigma_r2 = cal.sigma_r1;
  return cal;
}

NoiseCalibration shift_magnitudes(NoiseCalibration cal, double alpha,
                                  int num_episodes, int horizon, int d1, int d2) {
  if (!(alpha > 0.0 && alpha <= 1.0)) throw DomainError("alpha must lie in (0, 1]");
  if (num_episodes < 1 || horizon < 1 || d1 < 1 || d2 < 1) {
    throw DomainError("K, H, d1 and d2 must be positive");
  }
  const double kh = static_cast<double>(num_episodes) * horizon;
  const double sqrt_m = std::sqrt(static_cast<double>(cal.m));
  const double op_tail = std::sqrt(8.0 * std::log(8.0 * kh / alpha));
  const double chi_tail = std::sqrt(2.0 * std::log(4.0 * kh / alpha));

  cal.shift_p = cal.sigma_p1 * sqrt_m * (4.0 * std::sqrt(static_cast<double>(d1)) + op_tail);
  cal.shift_r = cal.sigma_r1 * sqrt_m * (4.0 * std::sqrt(static_cast<double>(d2)) + op_tail);
  cal.lambda_min_p = cal.shift_p;
  cal.lambda_max_p = 3.0 * cal.shift_p;
  cal.lambda_min_r = cal.shift_r;
  cal.lambda_max_r = 3.0 * cal.shift_r;
  cal.nu_p = cal.shift_p > 0.0
                 ? cal.sigma_p2 * std::sqrt(cal.m / cal.shift_p) *
                       (std::sqrt(static_cast<double>(d1)) + chi_tail)
                 : 0.0;
  cal.nu_r = cal.shift_r > 0.0
                 ? cal.sigma_r2 * std::sqrt(cal.m / cal.shift_r) *
                       (std::sqrt(static_cast<double>(d2)) + chi_tail)
                 : 0.0;
  return cal;
}

ConfidenceParams confidence_params(const NoiseCalibration& cal, double alpha) {
  ConfidenceParams cp;
  cp.alpha = alpha;
  cp.lambda_min_p = cal.lambda_min_p;
  cp.lambda_max_p = cal.lambda_max_p;
  cp.lambda_min_r = cal.lambda_min_r;
  cp.lambda_max_r = cal.lambda_max_r;
  cp.nu_p = cal.nu_p;
  cp.nu_r = cal.nu_r;
  return cp;
}

nlohmann::json accounting_report(const NoiseCalibration& cal,
                                 const PrivacyBudget& budget, int horizon) {
  validate_budget(budget);
  const double per_eps = budget.epsilon / (4.0 * horizon);
  const double per_delta = budget.delta / (4.0 * horizon);
  const double log_factor = std::log(4.0 * horizon / budget.delta);
  nlohmann::json counters = nlohmann::json::array();
  auto counter = [&](const char* name, double sigma, double sensitivity) {
    counters.push_back({{"name", name},
                        {"sigma", sigma},
                        {"sensitivity", sensitivity},
                        {"epsilon", per_eps},
                        {"delta", per_delta},
                        {"log_factor", log_factor}});
  };
  counter("transition_gram", cal.sigma_p1, cal.delta_p1);
  counter("transition_target", cal.sigma_p2, cal.delta_p2);
  counter("reward_gram", cal.sigma_r1, cal.delta_r);
  counter("reward_target", cal.sigma_r2, cal.delta_r);
  return {{"m", cal.m},
          {"sigma_p1", cal.sigma_p1},
          {"sigma_p2", cal.sigma_p2},
          {"sigma_r1", cal.sigma_r1},
          {"sigma_r2", cal.sigma_r2},
          {"Sigma_p1", cal.shift_p},
          {"Sigma_r", cal.shift_r},
          {"lambda_min_p", cal.lambda_min_p},
          {"lambda_max_p", cal.lambda_max_p},
          {"lambda_min_r", cal.lambda_min_r},
          {"lambda_max_r", cal.lambda_max_r},
          {"nu_p", cal.nu_p},
          {"nu_r", cal.nu_r},
          {"per_counter_epsilon", per_eps},
          {"per_counter_delta", per_delta},
          {"counters", counters}};
}

}  // namespace dpmix
