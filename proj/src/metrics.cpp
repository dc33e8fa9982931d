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

#include "ivakit/metrics.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "ivakit/error.hpp"

namespace ivakit {

MatrixList gain_matrices(const UnmixingSet& unmixing, const MixingSet& mixing) {
  require(unmixing.k_count() == mixing.matrices.size(), ErrorCode::kShape,
          "unmixing and mixing sets differ in K");
  MatrixList out;
  for (std::size_t k = 0; k < unmixing.k_count(); ++k) {
    require(unmixing.matrices[k].cols() == mixing.matrices[k].rows(), ErrorCode::kShape,
            "unmixing/mixing shape mismatch in dataset " + std::to_string(k));
    out.push_back(unmixing.matrices[k] * mixing.matrices[k]);
  }
  return out;
}

double joint_isi(const MatrixList& gains) {
  require(!gains.empty(), ErrorCode::kShape, "no gain matrices");
  const Eigen::Index p = gains.front().rows();
  require(p >= 2, ErrorCode::kShape, "ISI needs p >= 2");
  Matrix g = Matrix::Zero(p, p);
  for (const Matrix& gk : gains) {
    require(gk.rows() == p && gk.cols() == p, ErrorCode::kShape, "gain matrices must be p x p");
    require(gk.allFinite(), ErrorCode::kUndefinedMetric, "gain matrix has non-finite entries");
    g += gk.cwiseAbs();
  }
  double rows = 0.0, cols = 0.0;
  for (Eigen::Index s = 0; s < p; ++s) {
    const double m = g.row(s).maxCoeff();
    if (!(m > 0.0)) fail(ErrorCode::kUndefinedMetric, "gain row " + std::to_string(s) + " is zero");
    rows += g.row(s).sum() / m - 1.0;
  }
  for (Eigen::Index j = 0; j < p; ++j) {
    const double m = g.col(j).maxCoeff();
    if (!(m > 0.0)) fail(ErrorCode::kUndefinedMetric, "gain column " + std::to_string(j) + " is zero");
    cols += g.col(j).sum() / m - 1.0;
  }
  return (rows + cols) / (2.0 * static_cast<double>(p) * static_cast<double>(p - 1));
}

double isi(const Matrix& gain) { return joint_isi(MatrixList{gain}); }

std::vector<int> max_weight_assignment(const Matrix& weights) {
  const int n = static_cast<int>(weights.rows());
  require(weights.cols() == n, ErrorCode::kShape, "assignment needs a square weight matrix");
  require(weights.allFinite(), ErrorCode::kUndefinedMetric, "assignment weights must be finite");
  if (n == 0) return {};
  // Shortest augmenting path Hungarian method on cost = -weight, 1-based.
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0);
  std::vector<int> match(n + 1, 0), way(n + 1, 0);
  for (int i = 1; i <= n; ++i) {
    match[0] = i;
    int j0 = 0;
    std::vector<double> minv(n + 1, inf);
    std::vector<char> used(n + 1, 0);
    do {
      used[j0] = 1;
      const int i0 = match[j0];
      double delta = inf;
      int j1 = 0;
      for (int j = 1; j <= n; ++j) {
        if (used[j]) continue;
        const double cur = -weights(i0 - 1, j - 1) - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (int j = 0; j <= n; ++j) {
        if (used[j]) {
          u[match[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (match[j0] != 0);
    do {
      const int j1 = way[j0];
      match[j0] = match[j1];
      j0 = j1;
    } while (j0 != 0);
  }
  std::vector<int> assignment(n, -1);
  for (int j = 1; j <= n; ++j) assignment[match[j] - 1] = j - 1;
  return assignment;
}

namespace {

Vector standardized(const Eigen::RowVectorXd& x, const char* what, Eigen::Index j, Eigen::Index k) {
  const double mean = x.mean();
  const Vector c = (x.array() - mean).transpose();
  const double norm = c.norm();
  if (!(norm > 0.0))
    fail(ErrorCode::kUndefinedMetric, std::string(what) + " SCV " + std::to_string(j) + " has zero variance in dataset " +
                                          std::to_string(k));
  return c / norm;
}

}  // namespace

Matrix alignment_affinity(const SourceEstimates& estimates, const SourceEstimates& truth) {
  require(estimates.source_count() == truth.source_count() && estimates.k_count() == truth.k_count() &&
              estimates.sample_count() == truth.sample_count(),
          ErrorCode::kShape, "estimates and truth differ in shape");
  const Eigen::Index p = truth.source_count();
  const Eigen::Index k_count = truth.k_count();
  Matrix affinity = Matrix::Zero(p, p);
  for (Eigen::Index k = 0; k < k_count; ++k) {
    Matrix e(truth.sample_count(), p), t(truth.sample_count(), p);
    for (Eigen::Index j = 0; j < p; ++j) {
      e.col(j) = standardized(estimates.scvs[j].row(k), "estimated", j, k);
      t.col(j) = standardized(truth.scvs[j].row(k), "true", j, k);
    }
    affinity += (e.transpose() * t).cwiseAbs();
  }
  return affinity;
}

AlignmentResult align_to_truth(const SourceEstimates& estimates, const SourceEstimates& truth) {
  const Matrix affinity = alignment_affinity(estimates, truth);
  const Eigen::Index p = truth.source_count();
  const Eigen::Index k_count = truth.k_count();
  // Rows of the transposed affinity are truth SCVs, so the assignment maps truth -> estimate.
  const std::vector<int> perm = max_weight_assignment(affinity.transpose());
  AlignmentResult out;
  out.alignment.permutation = perm;
  out.alignment.signs = Matrix::Ones(k_count, p);
  for (Eigen::Index l = 0; l < p; ++l) {
    Matrix block = estimates.scvs[perm[l]];
    for (Eigen::Index k = 0; k < k_count; ++k) {
      const Eigen::RowVectorXd a = block.row(k).array() - block.row(k).mean();
      const Eigen::RowVectorXd b = truth.scvs[l].row(k).array() - truth.scvs[l].row(k).mean();
      if (a.dot(b) < 0.0) {
        out.alignment.signs(k, l) = -1.0;
        block.row(k) = -block.row(k);
      }
    }
    out.aligned.scvs.push_back(std::move(block));
  }
  return out;
}

}  // namespace ivakit
