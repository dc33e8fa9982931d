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

#include <optional>
#include <string>

#include "driver.hpp"

namespace ivakit {

namespace detail {

std::optional<Vector> solve_spd(const Matrix& hessian, const Vector& gradient) {
  const Eigen::LLT<Matrix> llt(hessian);
  if (llt.info() != Eigen::Success) return std::nullopt;
  // Pivots of a numerically rank-deficient Hessian pass the factorization on rounding noise.
  const Vector pivots = llt.matrixLLT().diagonal().array().square();
  if (!(pivots.minCoeff() > 1e-10 * pivots.maxCoeff())) return std::nullopt;
  Vector dir = llt.solve(gradient);
  if (!dir.allFinite()) return std::nullopt;
  return dir;
}

Vector newton_direction(const RowDerivatives& d, const OptimizerConfig& cfg, Eigen::Index j) {
  if (auto dir = solve_spd(d.hessian, d.gradient)) return *dir;
  if (!cfg.hessian_fallback)
    fail(ErrorCode::kNumericalFailure, "Hessian of row " + std::to_string(j) + " is not positive definite");
  return d.gradient;
}

void apply_row_step(UnmixingSet& w, const DatasetCollection& data, Eigen::Index j, const Vector& dir,
                    double step_size) {
  const Eigen::Index p = data.channel_count();
  for (std::size_t k = 0; k < w.k_count(); ++k)
    w.matrices[k].row(j) -= step_size * dir.segment(static_cast<Eigen::Index>(k) * p, p).transpose();
  normalize_row_variance(w, data, j);
}

StepFn make_newton_step(const CostContext& ctx, const OptimizerConfig& cfg) {
  return [&ctx, &cfg](const UnmixingSet& w) {
    UnmixingSet next = w;
    for (Eigen::Index j = 0; j < ctx.collection.channel_count(); ++j) {
      const Vector dir = newton_direction(row_derivatives(ctx, next, j, true), cfg, j);
      apply_row_step(next, ctx.collection, j, dir, cfg.step_size);
    }
    return next;
  };
}

}  // namespace detail

OptimizerResult run_newton(const CostContext& base, const OptimizerConfig& cfg) {
  base.validate();
  CostContext ctx = base;
  UnmixingSet start =
      detail::resolve_start(cfg, ctx.collection.channel_count(), ctx.collection.k_count());
  const detail::EvaluateFn evaluate = detail::make_refreshing_cost(ctx, base.models, cfg);
  return detail::drive("newton", cfg, std::move(start), ctx.det_floor,
                       detail::make_newton_step(ctx, cfg), evaluate);
}

}  // namespace ivakit
