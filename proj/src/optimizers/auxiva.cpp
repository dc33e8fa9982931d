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

Matrix auxiva_weighted_covariance(const Matrix& x, const Vector& radius, const RadialParams& profile) {
  require(radius.size() == x.cols(), ErrorCode::kShape, "radius length does not match the sample count");
  Vector weights(radius.size());
  for (Eigen::Index i = 0; i < radius.size(); ++i) weights(i) = radial_weight(profile, radius(i));
  Matrix v = x * weights.asDiagonal() * x.transpose() / static_cast<double>(x.cols());
  return 0.5 * (v + v.transpose());
}

Vector auxiva_row_update(const Matrix& w, const Matrix& v, Eigen::Index j) {
  const Eigen::Index p = w.rows();
  const Eigen::PartialPivLU<Matrix> lu(w * v);
  const double rcond = lu.rcond();
  if (!(rcond > 1e-14)) fail(ErrorCode::kNumericalFailure, "W V is singular (rcond " + std::to_string(rcond) + ")");
  Vector row = lu.solve(Vector::Unit(p, j));
  const double scale = row.dot(v * row);
  if (!(scale > 0.0) || !std::isfinite(scale))
    fail(ErrorCode::kNumericalFailure, "weighted covariance is not positive definite");
  return row / std::sqrt(scale);
}

OptimizerResult run_auxiva(const CostContext& base, const OptimizerConfig& cfg) {
  base.validate();
  const DatasetCollection& data = base.collection;
  const Eigen::Index p = data.channel_count();
  const auto k_count = static_cast<Eigen::Index>(data.k_count());
  std::vector<RadialParams> profiles;
  for (std::size_t j = 0; j < base.models.size(); ++j) {
    const DensityModel& m = base.models[j];
    require(m.family() == Family::kSuperGaussianRadial, ErrorCode::kPrecondition,
            "AuxIVA needs super-Gaussian radial models (SCV " + std::to_string(j) + ")");
    require(m.location().isZero(0.0) && m.scatter().isIdentity(0.0), ErrorCode::kPrecondition,
            "AuxIVA radial models must be spherical with zero location");
    profiles.push_back(std::get<RadialParams>(m.params()));
  }

  UnmixingSet start = detail::resolve_start(cfg, p, data.k_count());
  auto evaluate = [&](const UnmixingSet& w) { return iva_cost(base, w); };
  auto step = [&](const UnmixingSet& w) {
    UnmixingSet next = w;
    for (Eigen::Index j = 0; j < p; ++j) {
      Matrix s(k_count, data.sample_count());
      for (Eigen::Index k = 0; k < k_count; ++k)
        s.row(k) = next.matrices[static_cast<std::size_t>(k)].row(j) * data.dataset(static_cast<std::size_t>(k));
      const Vector r = s.colwise().norm().transpose();
      for (Eigen::Index k = 0; k < k_count; ++k) {
        Matrix& wk = next.matrices[static_cast<std::size_t>(k)];
        Matrix v = auxiva_weighted_covariance(data.dataset(static_cast<std::size_t>(k)), r, profiles[j]);
        Vector row;
        try {
          row = auxiva_row_update(wk, v, j);
        } catch (const Error& e) {
          if (e.code() != ErrorCode::kNumericalFailure) throw;
          v.diagonal().array() += 1e-8 * v.trace() / static_cast<double>(p);
          row = auxiva_row_update(wk, v, j);
        }
        wk.row(j) = row.transpose();
      }
    }
    return next;
  };

  OptimizerConfig fixed_point = cfg;
  fixed_point.step_size = 1.0;
  return detail::drive("auxiva", fixed_point, std::move(start), base.det_floor, step, evaluate);
}

}  // namespace ivakit
