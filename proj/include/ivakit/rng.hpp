// Copyright 2026 The ivakit Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstdint>
#include <limits>

#include "ivakit/types.hpp"

namespace ivakit {

/// SplitMix64 finalizer. Used as the mixing function of the counter-based
/// generator and for deriving child seeds.
std::uint64_t mix64(std::uint64_t x) noexcept;

/// Counter-based generator: the i-th output is mix64(key + i * gamma). Streams
/// are split by hashing a stream id into a fresh key, so any stream can be
/// regenerated in isolation from (seed, stream id). Satisfies
/// UniformRandomBitGenerator, so the std distributions work on top of it.
class CounterRng {
 public:
  using result_type = std::uint64_t;

  explicit CounterRng(std::uint64_t seed) noexcept : key_(mix64(seed)) {}

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  result_type operator()() noexcept;

  /// Independent child stream; does not advance this generator.
  CounterRng split(std::uint64_t stream) const noexcept;

  std::uint64_t key() const noexcept { return key_; }

 private:
  struct FromKey {};
  CounterRng(FromKey, std::uint64_t key) noexcept : key_(key) {}

  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

/// Seed of replicate `index` under `master`: mix64(master ^ mix64(index + 1)).
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) noexcept;

Matrix standard_normal_matrix(CounterRng& rng, Eigen::Index rows, Eigen::Index cols);

/// Haar-distributed orthogonal matrix (QR of a Gaussian matrix with the sign
/// of R's diagonal folded into Q).
Matrix random_orthogonal(CounterRng& rng, Eigen::Index size);

}  // namespace ivakit
