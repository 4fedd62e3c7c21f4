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

#include "dpmix/tree_counter.h"

#include <algorithm>
#include <bit>
#include <cmath>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "dpmix/errors.h"

namespace dpmix {
namespace {

Eigen::MatrixXd Scalar(double x) { return Eigen::MatrixXd::Constant(1, 1, x); }

TEST(DyadicTest, CeilLog2AndBound) {
  EXPECT_EQ(ceil_log2(1), 0);
  EXPECT_EQ(ceil_log2(2), 1);
  EXPECT_EQ(ceil_log2(3), 2);
  EXPECT_EQ(ceil_log2(8), 3);
  EXPECT_EQ(ceil_log2(9), 4);
  EXPECT_EQ(tree_membership_bound(8), 4);
  EXPECT_EQ(tree_membership_bound(2000), 12);
  EXPECT_EQ(tree_membership_bound(1), 1);
}

TEST(DyadicTest, CoverIsMinimalDisjointAndExact) {
  EXPECT_TRUE(dyadic_cover(0).empty());
  EXPECT_EQ(dyadic_cover(3), (std::vector<DyadicInterval>{{1, 2}, {3, 3}}));
  for (std::int64_t n = 1; n <= 4096; ++n) {
    auto cover = dyadic_cover(n);
    std::int64_t next = 1;
    for (const auto& iv : cover) {
      const std::int64_t len = iv.size();
      ASSERT_EQ(iv.first, next);
      ASSERT_EQ(len & (len - 1), 0);
      ASSERT_EQ((iv.first - 1) % len, 0);
      next = iv.last + 1;
    }
    ASSERT_EQ(next, n + 1);
    ASSERT_EQ(static_cast<int>(cover.size()), std::popcount(static_cast<std::uint64_t>(n)));
  }
}

TEST(NoisyPSumTreeTest, FourAppendsMaterializeSevenIntervals) {
  NoisyPSumTree tree(ElementShape::kScalar, 1, 1.0, 8);
  std::mt19937_64 rng(1);
  for (int i = 1; i <= 4; ++i) tree.append(Scalar(i), rng);
  auto made = tree.materialized();
  std::sort(made.begin(), made.end());
  std::vector<DyadicInterval> expected = {{1, 1}, {1, 2}, {1, 4}, {2, 2},
                                          {3, 3}, {3, 4}, {4, 4}};
  EXPECT_EQ(made, expected);
  EXPECT_TRUE(tree.is_retained({1, 4}));
  EXPECT_TRUE(tree.is_retained({1, 2}));
  EXPECT_TRUE(tree.is_retained({3, 3}));
  EXPECT_FALSE(tree.is_retained({3, 4}));
  EXPECT_FALSE(tree.is_retained({4, 4}));
  EXPECT_THROW(tree.node_noise({4, 4}), ProtocolError);
}

TEST(NoisyPSumTreeTest, ZeroSigmaStoresZeroNoise) {
  NoisyPSumTree tree(ElementShape::kSymmetricMatrix, 3, 0.0, 16);
  std::mt19937_64 rng(2);
  for (int i = 0; i < 16; ++i) tree.append(Eigen::MatrixXd::Identity(3, 3) * i, rng);
  for (const auto& iv : tree.materialized()) {
    if (tree.is_retained(iv)) EXPECT_TRUE(tree.node_noise(iv).isZero(0.0));
  }
  for (int k = 1; k <= 17; ++k) EXPECT_TRUE(tree.total_noise(k).isZero(0.0));
}

TEST(NoisyPSumTreeTest, PrefixExamples) {
  NoisyPSumTree tree(ElementShape::kScalar, 1, 0.0, 5);
  std::mt19937_64 rng(3);
  for (int i = 1; i <= 5; ++i) tree.append(Scalar(i), rng);
  EXPECT_EQ(tree.private_prefix(1)(0, 0), 0.0);
  EXPECT_EQ(tree.private_prefix(5)(0, 0), 10.0);
  EXPECT_EQ(tree.cover(5), (std::vector<DyadicInterval>{{1, 4}}));
  EXPECT_EQ(tree.private_prefix(4)(0, 0), 6.0);
  EXPECT_EQ(tree.cover(4), (std::vector<DyadicInterval>{{1, 2}, {3, 3}}));
  EXPECT_EQ(tree.private_prefix(6)(0, 0), 15.0);
}

TEST(NoisyPSumTreeTest, ZeroNoiseIntegerStreamsAreExact) {
  std::mt19937_64 rng(4);
  std::uniform_int_distribution<int> value(-1000, 1000);
  NoisyPSumTree tree(ElementShape::kVector, 3, 0.0, 4096);
  Eigen::MatrixXd running = Eigen::MatrixXd::Zero(3, 1);
  for (int k = 1; k <= 4096; ++k) {
    ASSERT_TRUE(tree.private_prefix(k) == running) << "k=" << k;
    Eigen::MatrixXd item(3, 1);
    for (int i = 0; i < 3; ++i) item(i, 0) = value(rng);
    tree.append(item, rng);
    running += item;
  }
  EXPECT_TRUE(tree.private_prefix(4097) == running);
}

TEST(NoisyPSumTreeTest, MembershipAndCoverRespectBound) {
  const std::int64_t kMax = 4096;
  NoisyPSumTree tree(ElementShape::kScalar, 1, 0.0, kMax);
  std::mt19937_64 rng(5);
  std::vector<int> membership(kMax + 1, 0);
  std::size_t seen = 0;
  int max_membership = 0;
  for (std::int64_t k = 1; k <= kMax; ++k) {
    tree.append(Scalar(1.0), rng);
    const auto& made = tree.materialized();
    for (; seen < made.size(); ++seen) {
      for (std::int64_t j = made[seen].first; j <= made[seen].last; ++j) {
        max_membership = std::max(max_membership, ++membership[j]);
      }
    }
    const int bound = tree_membership_bound(k);
    ASSERT_LE(max_membership, bound) << "K=" << k;
    ASSERT_LE(static_cast<int>(tree.cover(k + 1).size()), bound) << "K=" << k;
  }
}

TEST(NoisyPSumTreeTest, NoiseDecomposesOverCover) {
  NoisyPSumTree tree(ElementShape::kSymmetricMatrix, 2, 0.7, 64);
  std::mt19937_64 rng(6);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int i = 0; i < 64; ++i) {
    Eigen::MatrixXd x(2, 1);
    x << unit(rng), unit(rng);
    tree.append(x * x.transpose(), rng);
  }
  for (int k = 1; k <= 65; ++k) {
    Eigen::MatrixXd noise = tree.zero();
    for (const auto& iv : tree.cover(k)) noise += tree.node_noise(iv);
    Eigen::MatrixXd diff = tree.private_prefix(k) - tree.exact_prefix(k);
    EXPECT_LE((diff - noise).cwiseAbs().maxCoeff(), 1e-12);
    EXPECT_TRUE(tree.total_noise(k) == tree.total_noise(k).transpose());
  }
}

TEST(NoisyPSumTreeTest, QueriesDoNotDisturbNoise) {
  NoisyPSumTree tree(ElementShape::kVector, 4, 2.0, 100);
  std::mt19937_64 rng(7);
  for (int i = 0; i < 100; ++i) tree.append(Eigen::MatrixXd::Ones(4, 1), rng);
  const auto hash = tree.noise_hash();
  const Eigen::MatrixXd first = tree.private_prefix(77);
  std::uniform_int_distribution<int> k(1, 101);
  for (int q = 0; q < 10000; ++q) tree.private_prefix(k(rng));
  EXPECT_EQ(tree.noise_hash(), hash);
  EXPECT_TRUE(tree.private_prefix(77) == first);
}

TEST(NoisyPSumTreeTest, NoiseVarianceScalesWithCoverSize) {
  // Prefix [1,7] is covered by [1,4], [5,6], [7,7].
  const int draws = 10000;
  const double sigma = 1.5;
  std::vector<double> scalar, diag, off;
  for (int t = 0; t < draws; ++t) {
    std::mt19937_64 rng(1000 + t);
    NoisyPSumTree s(ElementShape::kScalar, 1, sigma, 8);
    NoisyPSumTree m(ElementShape::kSymmetricMatrix, 2, sigma, 8);
    for (int i = 0; i < 7; ++i) {
      s.append(Scalar(0.0), rng);
      m.append(Eigen::MatrixXd::Zero(2, 2), rng);
    }
    scalar.push_back(s.total_noise(8)(0, 0));
    Eigen::MatrixXd n = m.total_noise(8);
    diag.push_back(n(1, 1));
    off.push_back(n(0, 1));
  }
  auto variance = [](const std::vector<double>& xs) {
    double mean = 0.0;
    for (double x : xs) mean += x;
    mean /= xs.size();
    double ss = 0.0;
    for (double x : xs) ss += (x - mean) * (x - mean);
    return ss / (xs.size() - 1);
  };
  const double expected = 3.0 * sigma * sigma;
  EXPECT_NEAR(variance(scalar) / expected, 1.0, 0.05);
  EXPECT_NEAR(variance(diag) / expected, 1.0, 0.05);
  EXPECT_NEAR(variance(off) / expected, 1.0, 0.05);
}

TEST(NoisyPSumTreeTest, ProtocolAndShapeErrors) {
  NoisyPSumTree tree(ElementShape::kSymmetricMatrix, 2, 1.0, 2);
  std::mt19937_64 rng(8);
  EXPECT_THROW(tree.append(Eigen::MatrixXd::Zero(3, 3), rng), DomainError);
  Eigen::MatrixXd asym(2, 2);
  asym << 1.0, 2.0,
          0.0, 1.0;
  EXPECT_THROW(tree.append(asym, rng), DomainError);
  EXPECT_EQ(tree.count(), 0);
  tree.append(Eigen::MatrixXd::Identity(2, 2), rng);
  tree.append(Eigen::MatrixXd::Identity(2, 2), rng);
  EXPECT_THROW(tree.append(Eigen::MatrixXd::Identity(2, 2), rng), ProtocolError);
  EXPECT_THROW(tree.private_prefix(0), ProtocolError);
  EXPECT_THROW(tree.private_prefix(4), ProtocolError);
  EXPECT_NO_THROW(tree.private_prefix(3));
}

}  // namespace
}  // namespace dpmix
