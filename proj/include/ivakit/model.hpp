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

#include <optional>
#include <utility>

#include "ivakit/types.hpp"

namespace ivakit {

/// K aligned datasets, each p channels (rows) by n samples (columns).
///
/// The layout is channel-major so that a single unmixing row applied to a
/// dataset is a contiguous row-vector product. Construction validates the
/// shared shape (K >= 1, p >= 2, n > p) and that every entry is finite.
class DatasetCollection {
 public:
  explicit DatasetCollection(MatrixList data);

  std::size_t k_count() const noexcept { return data_.size(); }
  Eigen::Index channel_count() const noexcept { return data_.front().rows(); }
  Eigen::Index sample_count() const noexcept { return data_.front().cols(); }

  const Matrix& dataset(std::size_t k) const { return data_.at(k); }
  const MatrixList& datasets() const noexcept { return data_; }

 private:
  MatrixList data_;
};

struct WhiteningTransform {
  std::vector<Vector> means;
  MatrixList whiteners;  // symmetric (Cov^[k])^{-1/2}
};

/// K unmixing matrices W^[k]. Row j of W^[k] extracts component k of SCV j.
struct UnmixingSet {
  MatrixList matrices;
  bool composed_with_whitening = false;

  std::size_t k_count() const noexcept { return matrices.size(); }
  Eigen::Index channel_count() const { return matrices.at(0).rows(); }

  /// Throws kNearSingularUnmixing when some |det W^[k]| is below det_floor.
  void check_determinants(double det_floor) const;
};

/// p source component vectors; block j is K x n with row k = (w_j^[k])^T x^[k].
struct SourceEstimates {
  MatrixList scvs;

  Eigen::Index source_count() const noexcept { return static_cast<Eigen::Index>(scvs.size()); }
  Eigen::Index k_count() const { return scvs.at(0).rows(); }
  Eigen::Index sample_count() const { return scvs.at(0).cols(); }

  /// Regroups per-dataset source matrices (dataset k: p x n) into SCV blocks.
  static SourceEstimates from_datasets(const MatrixList& per_dataset);
  /// Inverse of from_datasets: dataset k gets row j = row k of block j.
  MatrixList to_datasets() const;
};

struct MixingSet {
  MatrixList matrices;
};

/// Sample covariance with 1/n normalization, about the sample mean of each row.
Matrix sample_covariance(const Matrix& rows_by_samples);

std::pair<DatasetCollection, std::vector<Vector>> center(const DatasetCollection& collection);

/// Symmetric inverse-square-root whitening of an already centered collection.
/// The default floor is 1e-10 times the largest eigenvalue of each dataset's
/// covariance; an explicit floor is absolute.
std::pair<DatasetCollection, WhiteningTransform> whiten(
    const DatasetCollection& collection, std::optional<double> eigen_floor = std::nullopt);

/// center followed by whiten, with the means recorded in the transform.
std::pair<DatasetCollection, WhiteningTransform> center_and_whiten(
    const DatasetCollection& collection, std::optional<double> eigen_floor = std::nullopt);

SourceEstimates apply_unmixing(const UnmixingSet& unmixing, const DatasetCollection& collection);

/// W^[k] * whitener^[k]: unmixing that acts on the (centered) raw data.
UnmixingSet compose_with_whitening(const UnmixingSet& unmixing, const WhiteningTransform& transform);

/// Symmetric positive definite inverse square root via the eigendecomposition.
Matrix inverse_sqrt_spd(const Matrix& spd);

}  // namespace ivakit
