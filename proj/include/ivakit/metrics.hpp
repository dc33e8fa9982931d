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

#include <vector>

#include "ivakit/model.hpp"

namespace ivakit {

/// G^[k] = W^[k] Omega^[k].
MatrixList gain_matrices(const UnmixingSet& unmixing, const MixingSet& mixing);

/// Joint ISI with g_bar = sum_k |G^[k]|: row-normalized plus column-normalized
/// terms over 2 p (p - 1). Throws kUndefinedMetric for a zero row or column.
double joint_isi(const MatrixList& gains);

/// Single-matrix (Amari) ISI, joint_isi of {gain}.
double isi(const Matrix& gain);

struct Alignment {
  std::vector<int> permutation;  // permutation[l] = estimate matched to truth SCV l
  Matrix signs;                  // K x p, signs(k, l) for truth SCV l in dataset k
};

/// Maximum-weight perfect matching on a square weight matrix; returns
/// assignment[row] = column. Ties resolve by the fixed scan order.
std::vector<int> max_weight_assignment(const Matrix& weights);

/// Affinity A(j, l) = sum_k |corr(est_j^[k], truth_l^[k])|.
Matrix alignment_affinity(const SourceEstimates& estimates, const SourceEstimates& truth);

struct AlignmentResult {
  Alignment alignment;
  SourceEstimates aligned;
};

AlignmentResult align_to_truth(const SourceEstimates& estimates, const SourceEstimates& truth);

}  // namespace ivakit
