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

#include <string>

#include "driver.hpp"

namespace ivakit {

std::string_view to_string(IvaGVariant variant) {
  switch (variant) {
    case IvaGVariant::kMatrixGradient: return "matrix_gradient";
    case IvaGVariant::kVectorGradient: return "vector_gradient";
    case IvaGVariant::kNewton: return "newton";
  }
  return "unknown";
}

IvaGVariant iva_g_variant_from_string(std::string_view name) {
  for (IvaGVariant v : {IvaGVariant::kMatrixGradient, IvaGVariant::kVectorGradient, IvaGVariant::kNewton})
    if (to_string(v) == name) return v;
  fail(ErrorCode::kConfig, "unknown IVA-G variant '" + std::string(name) + "'");
}

namespace {

OptimizerResult iva_g_stage(const DatasetCollection& data, const OptimizerConfig& cfg, IvaGVariant variant,
                            int stage) {
  const Eigen::Index p = data.channel_count();
  const int k = static_cast<int>(data.k_count());
  const std::vector<DensityModel> base(static_cast<std::size_t>(p), DensityModel::gaussian(k));
  CostContext ctx{data, base};
  UnmixingSet start = detail::resolve_start(cfg, p, data.k_count());

  OptimizerConfig refreshing = cfg;
  refreshing.refresh_gaussian_scatter = true;
  auto evaluate = [&](const UnmixingSet& w) {
    ctx.models = refresh_gaussian_models(base, apply_unmixing(w, data), cfg.scatter_ridge);
    return iva_g_cost(w, data, cfg.scatter_ridge, ctx.det_floor);
  };

  detail::StepFn step;
  switch (variant) {
    case IvaGVariant::kMatrixGradient:
      step = [&](const UnmixingSet& w) {
        const MatrixList grads = iva_gradients(ctx, w);
        UnmixingSet next = w;
        for (std::size_t kk = 0; kk < w.k_count(); ++kk) next.matrices[kk] -= cfg.step_size * grads[kk];
        return next;
      };
      break;
    case IvaGVariant::kVectorGradient:
      step = [&](const UnmixingSet& w) {
        UnmixingSet next = w;
        for (Eigen::Index j = 0; j < p; ++j) {
          const Vector g = row_gradient(ctx, next, j);
          for (std::size_t kk = 0; kk < next.k_count(); ++kk)
            next.matrices[kk].row(j) -= cfg.step_size * g.segment(static_cast<Eigen::Index>(kk) * p, p).transpose();
        }
        return next;
      };
      break;
    case IvaGVariant::kNewton:
      step = detail::make_newton_step(ctx, refreshing);
      break;
  }
  return detail::drive("iva_g_" + std::string(to_string(variant)), refreshing, std::move(start), ctx.det_floor,
                       step, evaluate, stage);
}

}  // namespace

OptimizerResult run_iva_g(const DatasetCollection& data, const OptimizerConfig& cfg, IvaGVariant variant) {
  return iva_g_stage(data, cfg, variant, 1);
}

OptimizerResult run_iva_gl(const DatasetCollection& data, const OptimizerConfig& cfg) {
  OptimizerResult first = iva_g_stage(data, cfg, IvaGVariant::kNewton, 1);

  OptimizerConfig second_cfg = cfg;
  second_cfg.init = InitKind::kProvided;
  second_cfg.initial = first.unmixing;
  second_cfg.refresh_gaussian_scatter = false;
  const int k = static_cast<int>(data.k_count());
  const CostContext ctx{data, std::vector<DensityModel>(static_cast<std::size_t>(data.channel_count()),
                                                        DensityModel::laplace(k))};

  auto merge = [&first](const ConvergenceReport& second) {
    ConvergenceReport out = first.report;
    out.algorithm = "iva_gl";
    out.cost_trace.insert(out.cost_trace.end(), second.cost_trace.begin(), second.cost_trace.end());
    out.stage_trace.insert(out.stage_trace.end(), second.stage_trace.begin(), second.stage_trace.end());
    out.criterion_trace.insert(out.criterion_trace.end(), second.criterion_trace.begin(),
                               second.criterion_trace.end());
    out.iterations_run += second.iterations_run;
    out.converged = second.converged;
    out.final_cost = second.final_cost;
    out.wall_time_seconds += second.wall_time_seconds;
    out.failure = second.failure;
    return out;
  };

  try {
    UnmixingSet start = detail::resolve_start(second_cfg, data.channel_count(), data.k_count());
    auto evaluate = [&](const UnmixingSet& w) { return iva_cost(ctx, w); };
    OptimizerResult second = detail::drive("iva_gl", second_cfg, std::move(start), ctx.det_floor,
                                           detail::make_newton_step(ctx, second_cfg), evaluate, 2);
    return {std::move(second.unmixing), merge(second.report)};
  } catch (const OptimizerError& e) {
    throw OptimizerError(e.code(), e.what(), merge(e.partial_report()), e.last_unmixing());
  }
}

}  // namespace ivakit
