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

#include "ivakit/model.hpp"

#include <cmath>
#include <string>

#include "ivakit/error.hpp"

namespace ivakit {

DatasetCollection::DatasetCollection(MatrixList data) : data_(std::move(data)) {
  require(!data_.empty(), ErrorCode::kDataValidation, "collection needs at least one dataset");
  const Eigen::Index p = data_.front().rows();
  const Eigen::Index n = data_.front().cols();
  require(p >= 2, ErrorCode::kDataValidation, "collection needs at least two channels");
  require(n > p, ErrorCode::kDataValidation,
          "collection needs more samples than channels (n=" + std::to_string(n) +
              ", p=" + std::to_string(p) + ")");
  for (std::size_t k = 0; k < data_.size(); ++k) {
    require(data_[k].rows() == p && data_[k].cols() == n, ErrorCode::kShape,
            "dataset " + std::to_string(k) + " has shape " + std::to_string(data_[k].rows()) + "x" +
                std::to_string(data_[k].cols()) + ", expected " + std::to_string(p) + "x" +
                std::to_string(n));
    require(data_[k].allFinite(), ErrorCode::kDataValidation,
            "dataset " + std::to_string(k) + " contains non-finite entries");
  }
}

void UnmixingSet::check_determinants(double det_floor) const {
  for (std::size_t k = 0; k < matrices.size(); ++k) {
    const double det = std::abs(matrices[k].determinant());
    if (!(det >= det_floor))
      fail(ErrorCode::kNearSingularUnmixing,
           "unmixing matrix " + std::to_string(k) + " has |det| = " + std::to_string(det) +
               " below the floor " + std::to_string(det_floor));
  }
}

SourceEstimates SourceEstimates::from_datasets(const MatrixList& per_dataset) {
  require(!per_dataset.empty(), ErrorCode::kShape, "no datasets to regroup");
  const Eigen::Index p = per_dataset.front().rows();
  const Eigen::Index n = per_dataset.front().cols();
  const auto k_count = static_cast<Eigen::Index>(per_dataset.size());
  SourceEstimates out;
  out.scvs.assign(static_cast<std::size_t>(p), Matrix(k_count, n));
  for (Eigen::Index k = 0; k < k_count; ++k) {
    const Matrix& y = per_dataset[static_cast<std::size_t>(k)];
    require(y.rows() == p && y.cols() == n, ErrorCode::kShape, "ragged per-dataset sources");
    for (Eigen::Index j = 0; j < p; ++j) out.scvs[static_cast<std::size_t>(j)].row(k) = y.row(j);
  }
  return out;
}

MatrixList SourceEstimates::to_datasets() const {
  const Eigen::Index p = source_count();
  const Eigen::Index k_total = k_count();
  MatrixList out(static_cast<std::size_t>(k_total), Matrix(p, sample_count()));
  for (Eigen::Index j = 0; j < p; ++j)
    for (Eigen::Index k = 0; k < k_total; ++k)
      out[static_cast<std::size_t>(k)].row(j) = scvs[static_cast<std::size_t>(j)].row(k);
  return out;
}

Matrix sample_covariance(const Matrix& x) {
  const Vector mean = x.rowwise().mean();
  const Matrix centered = x.colwise() - mean;
  return centered * centered.transpose() / static_cast<double>(x.cols());
}

std::pair<DatasetCollection, std::vector<Vector>> center(const DatasetCollection& collection) {
  MatrixList centered;
  std::vector<Vector> means;
  centered.reserve(collection.k_count());
  for (const Matrix& x : collection.datasets()) {
    Vector mean = x.rowwise().mean();
    centered.push_back(x.colwise() - mean);
    means.push_back(std::move(mean));
  }
  return {DatasetCollection(std::move(centered)), std::move(means)};
}

Matrix inverse_sqrt_spd(const Matrix& spd) {
  Eigen::SelfAdjointEigenSolver<Matrix> eig(spd);
  require(eig.info() == Eigen::Success, ErrorCode::kNumericalFailure, "eigendecomposition failed");
  const Vector inv_sqrt = eig.eigenvalues().array().rsqrt();
  return eig.eigenvectors() * inv_sqrt.asDiagonal() * eig.eigenvectors().transpose();
}

std::pair<DatasetCollection, WhiteningTransform> whiten(const DatasetCollection& collection,
                                                        std::optional<double> eigen_floor) {
  WhiteningTransform transform;
  MatrixList white;
  for (std::size_t k = 0; k < collection.k_count(); ++k) {
    const Matrix& x = collection.dataset(k);
    const Matrix cov = x * x.transpose() / static_cast<double>(x.cols());
    Eigen::SelfAdjointEigenSolver<Matrix> eig(cov);
    require(eig.info() == Eigen::Success, ErrorCode::kNumericalFailure,
            "eigendecomposition failed for dataset " + std::to_string(k));
    const Vector& lambda = eig.eigenvalues();  // ascending
    const double floor = eigen_floor.value_or(1e-10 * lambda.maxCoeff());
    if (!(lambda.minCoeff() >= floor) || !(lambda.minCoeff() > 0.0))
      fail(ErrorCode::kRankDeficiency,
           "dataset " + std::to_string(k) + " covariance eigenvalue " +
               std::to_string(lambda.minCoeff()) + " is below the floor " + std::to_string(floor));
    const Vector inv_sqrt = lambda.array().rsqrt();
    Matrix whitener = eig.eigenvectors() * inv_sqrt.asDiagonal() * eig.eigenvectors().transpose();
    whitener = (0.5 * (whitener + whitener.transpose())).eval();
    white.push_back(whitener * x);
    transform.means.push_back(Vector::Zero(x.rows()));
    transform.whiteners.push_back(std::move(whitener));
  }
  return {DatasetCollection(std::move(white)), std::move(transform)};
}

std::pair<DatasetCollection, WhiteningTransform> center_and_whiten(
    const DatasetCollection& collection, std::optional<double> eigen_floor) {
  auto [centered, means] = center(collection);
  auto [white, transform] = whiten(centered, eigen_floor);
  transform.means = std::move(means);
  return {std::move(white), std::move(transform)};
}

SourceEstimates apply_unmixing(const UnmixingSet& unmixing, const DatasetCollection& collection) {
  require(unmixing.k_count() == collection.k_count(), ErrorCode::kShape,
          "unmixing set has " + std::to_string(unmixing.k_count()) + " matrices for " +
              std::to_string(collection.k_count()) + " datasets");
  MatrixList per_dataset;
  per_dataset.reserve(collection.k_count());
  const Eigen::Index p = collection.channel_count();
  for (std::size_t k = 0; k < collection.k_count(); ++k) {
    const Matrix& w = unmixing.matrices[k];
    require(w.rows() == p && w.cols() == p, ErrorCode::kShape,
            "unmixing matrix " + std::to_string(k) + " is not " + std::to_string(p) + "x" +
                std::to_string(p));
    per_dataset.push_back(w * collection.dataset(k));
  }
  return SourceEstimates::from_datasets(per_dataset);
}

UnmixingSet compose_with_whitening(const UnmixingSet& unmixing, const WhiteningTransform& transform) {
  require(unmixing.k_count() == transform.whiteners.size(), ErrorCode::kShape,
          "unmixing/whitening dataset count mismatch");
  UnmixingSet out;
  out.composed_with_whitening = true;
  for (std::size_t k = 0; k < unmixing.k_count(); ++k)
    out.matrices.push_back(unmixing.matrices[k] * transform.whiteners[k]);
  return out;
}

}  // namespace ivakit
