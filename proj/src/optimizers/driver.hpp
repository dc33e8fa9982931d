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

#include <functional>
#include <optional>
#include <string>

#include "ivakit/optimizers.hpp"

namespace ivakit::detail {

/// Produces the next iterate from the current one.
using StepFn = std::function<UnmixingSet(const UnmixingSet&)>;

/// Called once per accepted iterate (including the start); may refresh model
/// state used by the next step, and returns the traced cost.
using EvaluateFn = std::function<double(const UnmixingSet&)>;

/// Shared outer loop: evaluate the start, then step / evaluate / criterion
/// until the tolerance or the iteration cap. Library errors are rethrown as
/// OptimizerError with the partial report.
OptimizerResult drive(const std::string& algorithm, const OptimizerConfig& cfg, UnmixingSet start,
                      double det_floor, const StepFn& step, const EvaluateFn& evaluate, int stage = 1);

/// Sample variance of each row block scaled to one: w_j^[k] /= std(w_j^[k] x^[k]).
void normalize_row_variance(UnmixingSet& unmixing, const DatasetCollection& data, Eigen::Index j);

/// cfg.initial or the configured starting point, validated against the shape.
UnmixingSet resolve_start(const OptimizerConfig& cfg, Eigen::Index p, std::size_t k_count);

}  // namespace ivakit::detail

namespace ivakit::detail {

/// Cholesky solve of hessian * dir = gradient; empty unless the Hessian is
/// positive definite and the solution finite.
std::optional<Vector> solve_spd(const Matrix& hessian, const Vector& gradient);

/// Newton direction for one row, or the gradient when the Hessian is not
/// positive definite and cfg allows the fallback.
Vector newton_direction(const RowDerivatives& d, const OptimizerConfig& cfg, Eigen::Index j);

/// w_j <- w_j - step * dir across all K datasets, then unit SCV variance.
void apply_row_step(UnmixingSet& w, const DatasetCollection& data, Eigen::Index j, const Vector& dir,
                    double step_size);

/// Newton row sweep over the models currently held by ctx.
StepFn make_newton_step(const CostContext& ctx, const OptimizerConfig& cfg);

/// Evaluation hook that refreshes Gaussian scatters (when enabled) and
/// returns iva_cost.
EvaluateFn make_refreshing_cost(CostContext& ctx, const std::vector<DensityModel>& base_models,
                                const OptimizerConfig& cfg);

}  // namespace ivakit::detail
