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

// Binary counting mechanism for continual release of prefix sums over a
// stream of scalars, vectors or symmetric matrices.
//
// Episode j (1-based) is a leaf; every complete dyadic interval
// [(b-1) 2^l + 1, b 2^l] becomes a node holding the exact partial sum and a
// Gaussian perturbation drawn once when the node is created.  The prefix
// [1, n] is released as the sum of the noisy nodes in the binary expansion of
// n, so every prefix touches at most ceil(log2 K) + 1 nodes.

#ifndef DPMIX_TREE_COUNTER_H_
#define DPMIX_TREE_COUNTER_H_

#include <cstdint>
#include <map>
#include <random>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace dpmix {

enum class ElementShape { kScalar, kVector, kSymmetricMatrix };

// Closed, 1-based interval of episodes.
struct DyadicInterval {
  std::int64_t first;
  std::int64_t last;

  std::int64_t size() const { return last - first + 1; }
  friend bool operator==(const DyadicInterval&, const DyadicInterval&) = default;
  friend auto operator<=>(const DyadicInterval&, const DyadicInterval&) = default;
};

// ceil(log2 k) for k >= 1.
int ceil_log2(std::int64_t k);

// ceil(log2 K) + 1: the bound on both node memberships per episode and cover
// size per prefix for a stream of length K.
int tree_membership_bound(std::int64_t num_episodes);

// Minimal dyadic cover of [1, n], largest interval first.  Empty for n = 0.
std::vector<DyadicInterval> dyadic_cover(std::int64_t n);

class NoisyPSumTree {
 public:
  // `dim` is ignored for scalars.  `capacity` is the stream length K.
  NoisyPSumTree(ElementShape shape, int dim, double sigma, std::int64_t capacity);

  ElementShape shape() const { return shape_; }
  Eigen::Index rows() const { return rows_; }
  Eigen::Index cols() const { return cols_; }
  double sigma() const { return sigma_; }
  std::int64_t capacity() const { return capacity_; }
  std::int64_t count() const { return count_; }

  // Appends the next stream element; draws noise for the new leaf and every
  // dyadic ancestor it completes, in that order.  Throws DomainError on a
  // shape mismatch and ProtocolError past capacity.
  void append(const Eigen::MatrixXd& item, std::mt19937_64& rng);

  // Noisy sum over episodes [1, k-1]; requires 1 <= k <= count() + 1.
  Eigen::MatrixXd private_prefix(std::int64_t k) const;
  // private_prefix(k) minus the exact prefix sum.
  Eigen::MatrixXd total_noise(std::int64_t k) const;
  Eigen::MatrixXd exact_prefix(std::int64_t k) const;
  // Intervals summed by private_prefix(k).
  std::vector<DyadicInterval> cover(std::int64_t k) const;

  // Cached perturbation of a retained node.  Throws ProtocolError otherwise.
  const Eigen::MatrixXd& node_noise(const DyadicInterval& interval) const;
  bool is_retained(const DyadicInterval& interval) const;
  std::size_t retained_count() const { return nodes_.size(); }
  // Every node ever created, in creation order.
  const std::vector<DyadicInterval>& materialized() const { return materialized_; }

  // FNV-1a hash over the bytes of every retained node's noise.
  std::uint64_t noise_hash() const;

  Eigen::MatrixXd zero() const { return Eigen::MatrixXd::Zero(rows_, cols_); }

 private:
  struct Node {
    Eigen::MatrixXd exact;
    Eigen::MatrixXd noise;
  };
  // (level, block): the interval [(block-1) 2^level + 1, block 2^level].
  using Key = std::pair<int, std::int64_t>;

  static Key KeyOf(const DyadicInterval& interval);
  Eigen::MatrixXd DrawNoise(std::mt19937_64& rng) const;
  void CheckPrefixArg(std::int64_t k) const;
  template <typename Fn>
  Eigen::MatrixXd SumCover(std::int64_t k, Fn&& term) const;

  ElementShape shape_;
  Eigen::Index rows_;
  Eigen::Index cols_;
  double sigma_;
  std::int64_t capacity_;
  std::int64_t count_ = 0;
  std::map<Key, Node> nodes_;
  std::vector<DyadicInterval> materialized_;
};

}  // namespace dpmix

#endif  // DPMIX_TREE_COUNTER_H_
