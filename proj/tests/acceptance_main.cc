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

// Acceptance suite: one PASS/FAIL line per criterion, non-zero exit status if
// any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numeric>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "dpmix/agents.h"
#include "dpmix/benchmark.h"
#include "dpmix/estimation.h"
#include "dpmix/harness.h"
#include "dpmix/linmix_mdp.h"
#include "dpmix/privacy_calib.h"
#include "dpmix/regularizer.h"
#include "dpmix/tree_counter.h"

namespace {

using namespace dpmix;
using Eigen::MatrixXd;
using Eigen::VectorXd;

struct Outcome {
  bool pass = true;
  std::string detail;
};

std::string Fmt(const char* fmt, double a, double b = 0.0, double c = 0.0, double d = 0.0) {
  char buf[256];
  std::snprintf(buf, sizeof(buf), fmt, a, b, c, d);
  return buf;
}

double Seconds(std::chrono::steady_clock::time_point since) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - since).count();
}

double Rel(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

// Gaussian elimination with partial pivoting on a copy of the system.
VectorXd EliminationSolve(MatrixXd a, VectorXd b) {
  const int n = static_cast<int>(a.rows());
  for (int col = 0; col < n; ++col) {
    int pivot = col;
    for (int r = col + 1; r < n; ++r)
      if (std::abs(a(r, col)) > std::abs(a(pivot, col))) pivot = r;
    a.row(col).swap(a.row(pivot));
    std::swap(b(col), b(pivot));
    for (int r = col + 1; r < n; ++r) {
      const double f = a(r, col) / a(col, col);
      for (int c = col; c < n; ++c) a(r, c) -= f * a(col, c);
      b(r) -= f * b(col);
    }
  }
  VectorXd x(n);
  for (int r = n - 1; r >= 0; --r) {
    double acc = b(r);
    for (int c = r + 1; c < n; ++c) acc -= a(r, c) * x(c);
    x(r) = acc / a(r, r);
  }
  return x;
}

Outcome EstimatorOracle() {
  std::mt19937_64 rng(101);
  std::uniform_int_distribution<int> dim(1, 5), count(1, 20);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::uniform_real_distribution<double> ridge(0.1, 2.0);
  double worst = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const int d = dim(rng), n = count(rng);
    const double lambda = ridge(rng);
    MatrixXd gram = lambda * MatrixXd::Identity(d, d);
    VectorXd u = VectorXd::Zero(d);
    for (int j = 0; j < n; ++j) {
      VectorXd x(d);
      for (int i = 0; i < d; ++i) x(i) = gauss(rng);
      const double y = gauss(rng);
      gram += x * x.transpose();
      u += x * y;
    }
    worst = std::max(worst, (solve_estimator(gram, u) - EliminationSolve(gram, u)).cwiseAbs().maxCoeff());
  }
  return {worst <= 1e-9, Fmt("max |theta - oracle| = %.3g over 100 instances", worst)};
}

Outcome TreeExactness() {
  const std::int64_t kmax = 4096;
  std::mt19937_64 rng(202);
  std::uniform_int_distribution<int> value(-50, 50);
  NoisyPSumTree scalar(ElementShape::kScalar, 1, 0.0, kmax);
  NoisyPSumTree vector(ElementShape::kVector, 4, 0.0, kmax);
  NoisyPSumTree matrix(ElementShape::kSymmetricMatrix, 3, 0.0, kmax);
  MatrixXd run_s = scalar.zero(), run_v = vector.zero(), run_m = matrix.zero();
  bool exact = true;
  for (std::int64_t k = 1; k <= kmax + 1 && exact; ++k) {
    exact = scalar.private_prefix(k) == run_s && vector.private_prefix(k) == run_v &&
            matrix.private_prefix(k) == run_m;
    if (k > kmax) break;
    MatrixXd s(1, 1), v(4, 1), m(3, 3);
    s(0, 0) = value(rng);
    for (int i = 0; i < 4; ++i) v(i, 0) = value(rng);
    for (int p = 0; p < 3; ++p)
      for (int q = p; q < 3; ++q) m(p, q) = m(q, p) = value(rng);
    scalar.append(s, rng);
    vector.append(v, rng);
    matrix.append(m, rng);
    run_s += s;
    run_v += v;
    run_m += m;
  }
  const int bound = tree_membership_bound(kmax);
  std::vector<int> membership(kmax + 1, 0);
  for (const auto& iv : scalar.materialized())
    for (std::int64_t j = iv.first; j <= iv.last; ++j) ++membership[j];
  const int max_membership = *std::max_element(membership.begin(), membership.end());
  int max_cover = 0;
  for (std::int64_t k = 1; k <= kmax + 1; ++k)
    max_cover = std::max(max_cover, static_cast<int>(scalar.cover(k).size()));
  Outcome out;
  out.pass = exact && max_membership <= bound && max_cover <= bound;
  out.detail = std::string(exact ? "prefixes exact" : "prefix mismatch") +
               Fmt(", max membership %.0f, max cover %.0f, bound %.0f", max_membership,
                   max_cover, bound);
  return out;
}

bool SameStats(const RegularizedStats& a, const RegularizedStats& b) {
  for (int h = 0; h < a.horizon(); ++h) {
    if (!(a.lambda_p[h] == b.lambda_p[h] && a.u_p[h] == b.u_p[h] &&
          a.lambda_r[h] == b.lambda_r[h] && a.u_r[h] == b.u_r[h]))
      return false;
  }
  return true;
}

Outcome WriteOnceNoise() {
  std::mt19937_64 rng(303);
  NoisyPSumTree tree(ElementShape::kSymmetricMatrix, 3, 1.0, 1000);
  for (int i = 0; i < 1000; ++i) tree.append(MatrixXd::Identity(3, 3), rng);
  const auto hash = tree.noise_hash();
  std::uniform_int_distribution<int> k(1, 1001);
  for (int q = 0; q < 10000; ++q) tree.private_prefix(k(rng));
  const bool hash_ok = tree.noise_hash() == hash;

  const int episodes = 128, horizon = 3, d1 = 4, d2 = 2;
  auto cal = shift_magnitudes(calibrate_noise({1.0, 0.1}, episodes, horizon, d1, d2), 0.1,
                              episodes, horizon, d1, d2);
  Privatizer priv(cal, horizon, d1, d2, episodes, noise_seed_for(3));
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<RegularizedStats> first = {priv.release(0)};
  for (int e = 1; e <= episodes; ++e) {
    std::vector<StepIncrement> incs;
    for (int h = 0; h < horizon; ++h) {
      VectorXd x = VectorXd::NullaryExpr(d1, [&] { return unit(rng); });
      VectorXd y = VectorXd::NullaryExpr(d2, [&] { return unit(rng); });
      incs.push_back(make_increment(x, unit(rng), y, unit(rng)));
    }
    priv.ingest(e, incs);
    first.push_back(priv.release(e));
  }
  bool release_ok = true;
  for (int rep = 0; rep < 3; ++rep)
    for (int e = 0; e <= episodes; ++e) release_ok = release_ok && SameStats(first[e], priv.release(e));
  return {hash_ok && release_ok,
          std::string(hash_ok ? "hash unchanged after 1e4 queries" : "hash changed") +
              (release_ok ? ", release(k) bit-identical" : ", release(k) changed")};
}

Outcome CalibrationConformance() {
  std::mt19937_64 rng(404);
  std::uniform_real_distribution<double> eps(0.1, 10.0), del(1e-5, 0.5), al(0.01, 1.0);
  std::uniform_int_distribution<int> k(2, 50000), h(1, 15), d(1, 40);
  double worst = 0.0;
  for (int trial = 0; trial < 50; ++trial) {
    const double e = eps(rng), dl = del(rng), a = al(rng);
    const int kk = k(rng), hh = h(rng), d1 = d(rng), d2 = d(rng);
    const auto cal =
        shift_magnitudes(calibrate_noise({e, dl}, kk, hh, d1, d2), a, kk, hh, d1, d2);
    int m = 1;
    while ((std::int64_t{1} << (m - 1)) < kk) ++m;
    const double c = std::sqrt(32.0 * m * std::log(4.0 * hh / dl));
    const double sp1 = hh * (d1 * hh * hh) / e * c;
    const double sp2 = hh * (std::sqrt(d1) * hh * hh) / e * c;
    const double sr = hh / e * c;
    const double kh = static_cast<double>(kk) * hh;
    const double op = std::sqrt(8.0 * std::log(8.0 * kh / a));
    const double chi = std::sqrt(2.0 * std::log(4.0 * kh / a));
    const double shp = sp1 * std::sqrt(m) * (4.0 * std::sqrt(d1) + op);
    const double shr = sr * std::sqrt(m) * (4.0 * std::sqrt(d2) + op);
    const double nup = sp2 * std::sqrt(m / shp) * (std::sqrt(d1) + chi);
    const double nur = sr * std::sqrt(m / shr) * (std::sqrt(d2) + chi);
    if (cal.m != m) return {false, Fmt("m mismatch at K=%.0f", kk)};
    for (auto [got, want] : std::vector<std::pair<double, double>>{
             {cal.sigma_p1, sp1}, {cal.sigma_p2, sp2}, {cal.sigma_r1, sr}, {cal.sigma_r2, sr},
             {cal.shift_p, shp}, {cal.shift_r, shr}, {cal.nu_p, nup}, {cal.nu_r, nur},
             {cal.lambda_min_p, shp}, {cal.lambda_max_p, 3.0 * shp},
             {cal.lambda_min_r, shr}, {cal.lambda_max_r, 3.0 * shr}}) {
      worst = std::max(worst, Rel(got, want));
    }
  }
  return {worst <= 1e-12, Fmt("max relative error %.3g over 50 tuples", worst)};
}

Outcome Concentration() {
  const int kk = 256, hh = 3, d = 2;
  const double alpha = 0.1;
  const auto cal = shift_magnitudes(calibrate_noise({1.0, 0.1}, kk, hh, d, d), alpha, kk, hh, d, d);
  const double chi_bound = std::sqrt(cal.m) * cal.sigma_p2 *
                           (std::sqrt(d) + std::sqrt(2.0 * std::log(4.0 * kk * hh / alpha)));
  // Prefix [1, 255] has the largest cover below K.
  const std::int64_t query = kk;
  int op_ok = 0, chi_ok = 0;
  const int draws = 1000;
  for (int t = 0; t < draws; ++t) {
    std::mt19937_64 rng(50000 + t);
    NoisyPSumTree gram(ElementShape::kSymmetricMatrix, d, cal.sigma_p1, kk);
    NoisyPSumTree target(ElementShape::kVector, d, cal.sigma_p2, kk);
    for (std::int64_t i = 1; i < query; ++i) {
      gram.append(MatrixXd::Zero(d, d), rng);
      target.append(MatrixXd::Zero(d, 1), rng);
    }
    Eigen::SelfAdjointEigenSolver<MatrixXd> eig(gram.total_noise(query), Eigen::EigenvaluesOnly);
    op_ok += eig.eigenvalues().cwiseAbs().maxCoeff() <= cal.shift_p;
    chi_ok += target.total_noise(query).norm() <= chi_bound;
  }
  const double f_op = static_cast<double>(op_ok) / draws;
  const double f_chi = static_cast<double>(chi_ok) / draws;
  return {f_op >= 0.9 && f_chi >= 0.9,
          Fmt("operator-norm frequency %.3f, chi-square frequency %.3f (threshold 0.9)", f_op, f_chi)};
}

RunSettings Settings(AgentKind agent, RegularizerSpec::Kind kind, int episodes) {
  RunSettings s;
  s.agent = agent;
  s.regularizer.kind = kind;
  s.regularizer.lambda = 1.0;
  s.regularizer.zero_noise_floor = 1.0;
  s.regularizer.epsilon = 2.0;
  s.regularizer.delta = 0.1;
  s.alpha = 0.1;
  s.num_episodes = episodes;
  return s;
}

Outcome Degeneration() {
  const auto mdp = benchmark_mdp();
  int identical = 0, total = 0;
  for (auto agent : {AgentKind::kValueIteration, AgentKind::kPolicyOptimization}) {
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
      auto a = execute_run(mdp, Settings(agent, RegularizerSpec::Kind::kFixedRidge, 200), seed);
      auto b = execute_run(mdp, Settings(agent, RegularizerSpec::Kind::kPrivatizerZeroNoise, 200), seed);
      identical += a.log.inst == b.log.inst && a.log.cum == b.log.cum;
      ++total;
    }
  }
  return {identical == total, Fmt("%.0f of %.0f run pairs bit-identical", identical, total)};
}

ConfidenceParams RidgeConfidence(const LinearMixtureMDP& mdp, int episodes) {
  FixedRidge reg(1.0, mdp.horizon(), mdp.d1(), mdp.d2(), episodes);
  return with_betas(reg.confidence(0.1), mdp.d1(), mdp.d2(), episodes, mdp.horizon());
}

Outcome Optimism() {
  const auto mdp = benchmark_mdp();
  const auto opt = exact_optimal_values(mdp);
  const int episodes = 500, runs = 200;
  const auto cp = RidgeConfidence(mdp, episodes);
  int optimistic = 0;
  for (int seed = 1; seed <= runs; ++seed) {
    FixedRidge reg(1.0, mdp.horizon(), mdp.d1(), mdp.d2(), episodes);
    std::mt19937_64 rng(seed);
    bool all = true;
    run_vi(mdp, reg, cp, episodes, rng,
           [&](int, const RegularizedStats&, const ValueEstimates& values, const Policy&) {
             for (int h = 0; h < mdp.horizon() && all; ++h)
               all = (values.v[h].array() >= opt.v[h].array()).all();
           });
    optimistic += all;
  }
  const double freq = static_cast<double>(optimistic) / runs;
  return {freq >= 0.95, Fmt("optimism held in %.0f of %.0f runs (%.3f, threshold 0.95)",
                            optimistic, runs, freq)};
}

Outcome RegretTrend() {
  const auto mdp = benchmark_mdp();
  const int episodes = 2000, seeds = 5;
  Outcome out;
  std::ostringstream detail;
  for (auto agent : {AgentKind::kValueIteration, AgentKind::kPolicyOptimization}) {
    double cum[2] = {0.0, 0.0};
    for (int arm = 0; arm < 2; ++arm) {
      const auto kind = arm == 0 ? RegularizerSpec::Kind::kFixedRidge : RegularizerSpec::Kind::kPrivatizer;
      std::vector<double> mean(episodes, 0.0);
      for (std::uint64_t seed = 1; seed <= seeds; ++seed) {
        auto run = execute_run(mdp, Settings(agent, kind, episodes), seed);
        for (int k = 0; k < episodes; ++k) mean[k] += run.log.inst[k] / seeds;
        cum[arm] += run.log.cum.back() / seeds;
      }
      const double head = head_mean(mean), tail = tail_mean(mean);
      const bool ok = tail < head;
      out.pass = out.pass && ok;
      detail << "\n    " << (agent == AgentKind::kValueIteration ? "vi" : "po") << " "
             << (arm == 0 ? "fixed_ridge" : "privatizer ") << Fmt(": head %.4f tail %.4f", head, tail)
             << (ok ? " (tail < head)" : " (tail not below head)");
    }
    const bool ordered = cum[0] <= cum[1];
    out.pass = out.pass && ordered;
    detail << "\n    " << (agent == AgentKind::kValueIteration ? "vi" : "po")
           << Fmt(" cumulative regret at K: non-private %.1f, private %.1f", cum[0], cum[1])
           << (ordered ? " (non-private <= private)" : " (non-private exceeds private)");
  }
  out.detail = detail.str();
  return out;
}

Outcome Coverage() {
  const auto mdp = benchmark_mdp();
  const int episodes = 300, runs = 200;
  const auto cp = RidgeConfidence(mdp, episodes);
  int covered = 0;
  for (int seed = 1; seed <= runs; ++seed) {
    FixedRidge reg(1.0, mdp.horizon(), mdp.d1(), mdp.d2(), episodes);
    std::mt19937_64 rng(seed);
    bool all = true;
    run_vi(mdp, reg, cp, episodes, rng,
           [&](int, const RegularizedStats& stats, const ValueEstimates& values, const Policy&) {
             for (int h = 0; h < mdp.horizon() && all; ++h) {
               all = weighted_norm(mdp.theta_p(h) - values.theta_p_hat[h], stats.lambda_p[h]) <= cp.beta_p &&
                     weighted_norm(mdp.theta_r(h) - values.theta_r_hat[h], stats.lambda_r[h]) <= cp.beta_r;
             }
           });
    covered += all;
  }
  const double freq = static_cast<double>(covered) / runs;
  return {freq >= 0.95, Fmt("confidence sets covered in %.0f of %.0f runs (%.3f, threshold 0.95)",
                            covered, runs, freq)};
}

struct Criterion {
  int id;
  const char* name;
  double budget_seconds;  // <= 0: no runtime limit
  std::function<Outcome()> check;
};

}  // namespace

int main() {
  const std::vector<Criterion> criteria = {
      {1, "estimator oracle equivalence", 1.0, EstimatorOracle},
      {2, "tree exactness and bounds", 10.0, TreeExactness},
      {3, "write-once noise", 0.0, WriteOnceNoise},
      {4, "calibration conformance", 0.0, CalibrationConformance},
      {5, "concentration realization", 30.0, Concentration},
      {6, "zero-noise degeneration", 0.0, Degeneration},
      {7, "empirical optimism", 0.0, Optimism},
      {8, "regret trend", 15.0 * 60.0, RegretTrend},
      {9, "confidence coverage", 5.0 * 60.0, Coverage},
  };
  int failures = 0;
  for (const auto& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome out;
    try {
      out = c.check();
    } catch (const std::exception& e) {
      out = {false, std::string("exception: ") + e.what()};
    }
    const double secs = Seconds(start);
    if (c.budget_seconds > 0.0 && secs >= c.budget_seconds) {
      out.pass = false;
      out.detail += Fmt(" [runtime %.2f s exceeds %.0f s]", secs, c.budget_seconds);
    }
    failures += !out.pass;
    std::printf("%s criterion %d (%s): %s [%.2f s]\n", out.pass ? "PASS" : "FAIL", c.id, c.name,
                out.detail.c_str(), secs);
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failures,
              criteria.size());
  return failures == 0 ? 0 : 1;
}
