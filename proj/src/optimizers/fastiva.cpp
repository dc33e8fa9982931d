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

#include <cmath>
#include <string>

#include "driver.hpp"

namespace ivakit {

namespace {

constexpr double kMinU = 1e-24;
constexpr double kWhiteTolerance = 1e-6;

void require_white(const DatasetCollection& data) {
  for (std::size_t k = 0; k < data.k_count(); ++k) {
    const Matrix& x = data.dataset(k);
    const double mean_err = x.rowwise().mean().cwiseAbs().maxCoeff();
    const Matrix cov = x * x.transpose() / static_cast<double>(x.cols());
    const double cov_err = (cov - Matrix::Identity(x.rows(), x.rows())).norm();
    if (!(mean_err <= kWhiteTolerance && cov_err <= kWhiteTolerance))
      fail(ErrorCode::kPrecondition, "FastIVA needs whitened data; dataset " + std::to_string(k) +
                                         " deviates from identity covariance by " +
                                         std::to_string(cov_err));
  }
}

Matrix symmetric_decorrelation(const Matrix& w) {
  return inverse_sqrt_spd(w * w.transpose()) * w;
}

Matrix scv_block(const UnmixingSet& w, const DatasetCollection& data, Eigen::Index j) {
  Matrix s(static_cast<Eigen::Index>(data.k_count()), data.sample_count());
  for (std::size_t k = 0; k < data.k_count(); ++k)
    s.row(static_cast<Eigen::Index>(k)) = w.matrices[k].row(j) * data.dataset(k);
  return s;
}

}  // namespace

OptimizerResult run_fastiva(const CostContext& ctx, const OptimizerConfig& cfg, const FastIvaNonlinearity& g) {
  ctx.validate();
  const DatasetCollection& data = ctx.collection;
  require_white(data);
  const Eigen::Index p = data.channel_count();
  const double n = static_cast<double>(data.sample_count());

  UnmixingSet start = detail::resolve_start(cfg, p, data.k_count());
  for (Matrix& w : start.matrices) w = symmetric_decorrelation(w);

  auto evaluate = [&](const UnmixingSet& w) {
    double contrast = 0.0;
    for (Eigen::Index j = 0; j < p; ++j) {
      const Vector u = scv_block(w, data, j).colwise().squaredNorm().transpose();
      double s = 0.0;
      for (Eigen::Index i = 0; i < u.size(); ++i) s += g.eval(std::max(u(i), kMinU)).g;
      contrast += s / n;
    }
    return contrast;
  };

  auto step = [&](const UnmixingSet& w) {
    UnmixingSet next = w;
    for (Eigen::Index j = 0; j < p; ++j) {
      const Matrix s = scv_block(w, data, j);
      const Vector u = s.colwise().squaredNorm().transpose();
      Vector d1(u.size()), d2(u.size());
      for (Eigen::Index i = 0; i < u.size(); ++i) {
        const NonlinearityValue v = g.eval(std::max(u(i), kMinU));
        d1(i) = v.d1;
        d2(i) = v.d2;
      }
      for (std::size_t k = 0; k < data.k_count(); ++k) {
        const auto y = s.row(static_cast<Eigen::Index>(k)).transpose().array();
        const double a = (d1.array() + y.square() * d2.array()).mean();
        const Vector b = data.dataset(k) * (d1.array() * y).matrix() / n;
        next.matrices[k].row(j) = a * w.matrices[k].row(j) - b.transpose();
      }
    }
    for (Matrix& m : next.matrices) m = symmetric_decorrelation(m);
    return next;
  };

  OptimizerConfig fixed_point = cfg;
  fixed_point.step_size = 1.0;
  return detail::drive("fastiva", fixed_point, std::move(start), ctx.det_floor, step, evaluate);
}

}  // namespace ivakit
