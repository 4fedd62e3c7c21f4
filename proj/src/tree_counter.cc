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

#include <bit>
#include <cmath>
#include <cstring>
#include <string>

#include "dpmix/errors.h"

namespace dpmix {

int ceil_log2(std::int64_t k) {
  if (k < 1) throw DomainError("ceil_log2 requires k >= 1");
  return static_cast<int>(std::bit_width(static_cast<std::uint64_t>(k - 1)));
}

int tree_membership_bound(std::int64_t num_episodes) {
  return ceil_log2(num_episodes) + 1;
}

std::vector<DyadicInterval> dyadic_cover(std::int64_t n) {
  std::vector<DyadicInterval> out;
  if (n < 0) throw DomainError("negative prefix length");
  std::int64_t start = 1;
  for (int level = 62; level >= 0; --level) {
    const std::int64_t size = std::int64_t{1} << level;
    if (n & size) {
      out.push_back({start, start + size - 1});
      start += size;
    }
  }
  return out;
}

NoisyPSumTree::NoisyPSumTree(ElementShape shape, int dim, double sigma,
                             std::int64_t capacity)
    : shape_(shape), sigma_(sigma), capacity_(capacity) {
  if (!(sigma >= 0.0) || !std::isfinite(sigma)) {
    throw DomainError("noise scale must be finite and non-negative");
  }
  if (capacity < 1) throw DomainError("tree capacity must be positive");
  switch (shape) {
    case ElementShape::kScalar:
      rows_ = cols_ = 1;
      break;
    case ElementShape::kVector:
      if (dim < 1) throw DomainError("vector dimension must be positive");
      rows_ = dim;
      cols_ = 1;
      break;
    case ElementShape::kSymmetricMatrix:
      if (dim < 1) throw DomainError("matrix dimension must be positive");
      rows_ = cols_ = dim;
      break;
  }
}

NoisyPSumTree::Key NoisyPSumTree::KeyOf(const DyadicInterval& interval) {
  const std::int64_t size = interval.size();
  if (size < 1 || !std::has_single_bit(static_cast<std::uint64_t>(size)) ||
      (interval.first - 1) % size != 0) {
    throw ProtocolError("interval [" + std::to_string(interval.first) + ", " +
                        std::to_string(interval.last) + "] is not dyadic");
  }
  return {std::countr_zero(static_cast<std::uint64_t>(size)), interval.last / size};
}

Eigen::MatrixXd NoisyPSumTree::DrawNoise(std::mt19937_64& rng) const {
  Eigen::MatrixXd noise = zero();
  if (sigma_ == 0.0) return noise;
  std::normal_distribution<double> gauss(0.0, sigma_);
  if (shape_ == ElementShape::kSymmetricMatrix) {
    // One draw per upper-triangular entry, mirrored below the diagonal.
    for (Eigen::Index p = 0; p < rows_; ++p) {
      for (Eigen::Index q = p; q < cols_; ++q) {
        noise(p, q) = gauss(rng);
        noise(q, p) = noise(p, q);
      }
    }
  } else {
    for (Eigen::Index p = 0; p < rows_; ++p) noise(p, 0) = gauss(rng);
  }
  return noise;
}

void NoisyPSumTree::append(const Eigen::MatrixXd& item, std::mt19937_64& rng) {
  if (item.rows() != rows_ || item.cols() != cols_) {
    throw DomainError("stream element has shape " + std::to_string(item.rows()) + "x" +
                      std::to_string(item.cols()) + ", expected " +
                      std::to_string(rows_) + "x" + std::to_string(cols_));
  }
  if (shape_ == ElementShape::kSymmetricMatrix) {
    const double scale = 1.0 + item.cwiseAbs().maxCoeff();
    if ((item - item.transpose()).cwiseAbs().maxCoeff() > 1e-9 * scale) {
      throw DomainError("matrix stream element is not symmetric");
    }
  }
  if (count_ >= capacity_) {
    throw ProtocolError("stream already holds its " + std::to_string(capacity_) + " elements");
  }
  const std::int64_t n = ++count_;

  nodes_[{0, n}] = Node{item, DrawNoise(rng)};
  materialized_.push_back({n, n});
  for (int level = 1; (n & ((std::int64_t{1} << level) - 1)) == 0; ++level) {
    const std::int64_t block = n >> level;
    auto left = nodes_.find({level - 1, 2 * block - 1});
    auto right = nodes_.find({level - 1, 2 * block});
    Eigen::MatrixXd exact = left->second.exact + right->second.exact;
    nodes_[{level, block}] = Node{std::move(exact), DrawNoise(rng)};
    materialized_.push_back({n - (std::int64_t{1} << level) + 1, n});
    // A right child never appears in a minimal cover: its parent does.
    nodes_.erase(right);
  }
}

void NoisyPSumTree::CheckPrefixArg(std::int64_t k) const {
  if (k < 1 || k - 1 > count_) {
    throw ProtocolError("prefix query k=" + std::to_string(k) + " with " +
                        std::to_string(count_) + " appended elements");
  }
}

std::vector<DyadicInterval> NoisyPSumTree::cover(std::int64_t k) const {
  CheckPrefixArg(k);
  return dyadic_cover(k - 1);
}

template <typename Fn>
Eigen::MatrixXd NoisyPSumTree::SumCover(std::int64_t k, Fn&& term) const {
  Eigen::MatrixXd out = zero();
  for (const DyadicInterval& interval : cover(k)) {
    out += term(nodes_.at(KeyOf(interval)));
  }
  return out;
}

Eigen::MatrixXd NoisyPSumTree::private_prefix(std::int64_t k) const {
  return SumCover(k, [](const Node& node) { return node.exact + node.noise; });
}

Eigen::MatrixXd NoisyPSumTree::total_noise(std::int64_t k) const {
  return SumCover(k, [](const Node& node) { return node.noise; });
}

Eigen::MatrixXd NoisyPSumTree::exact_prefix(std::int64_t k) const {
  return SumCover(k, [](const Node& node) { return node.exact; });
}

bool NoisyPSumTree::is_retained(const DyadicInterval& interval) const {
  return nodes_.contains(KeyOf(interval));
}

const Eigen::MatrixXd& NoisyPSumTree::node_noise(const DyadicInterval& interval) const {
  auto it = nodes_.find(KeyOf(interval));
  if (it == nodes_.end()) throw ProtocolError("node is not retained");
  return it->second.noise;
}

std::uint64_t NoisyPSumTree::noise_hash() const {
  std::uint64_t hash = 1469598103934665603ULL;
  auto mix = [&hash](const void* data, std::size_t len) {
    const auto* bytes = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < len; ++i) {
      hash ^= bytes[i];
      hash *= 1099511628211ULL;
    }
  };
  for (const auto& [key, node] : nodes_) {
    mix(&key.first, sizeof(key.first));
    mix(&key.second, sizeof(key.second));
    mix(node.noise.data(), sizeof(double) * static_cast<std::size_t>(node.noise.size()));
  }
  return hash;
}

}  // namespace dpmix
