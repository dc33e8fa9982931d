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

#include "driver.hpp"

namespace ivakit {

namespace detail {

EvaluateFn make_refreshing_cost(CostContext& ctx, const std::vector<DensityModel>& base_models,
                                const OptimizerConfig& cfg) {
  return [&ctx, &base_models, &cfg](const UnmixingSet& w) {
    if (cfg.refresh_gaussian_scatter)
      ctx.models = refresh_gaussian_models(base_models, apply_unmixing(w, ctx.collection), cfg.scatter_ridge);
    return iva_cost(ctx, w);
  };
}

}  // namespace detail

OptimizerResult run_natural_gradient(const CostContext& base, const OptimizerConfig& cfg) {
  base.validate();
  CostContext ctx = base;
  UnmixingSet start =
      detail::resolve_start(cfg, ctx.collection.channel_count(), ctx.collection.k_count());
  const detail::EvaluateFn evaluate = detail::make_refreshing_cost(ctx, base.models, cfg);
  auto step = [&](const UnmixingSet& w) {
    const MatrixList grads = iva_gradients(ctx, w);
    UnmixingSet next = w;
    for (std::size_t k = 0; k < w.k_count(); ++k) {
      const Matrix& wk = w.matrices[k];
      next.matrices[k] -= cfg.step_size * (grads[k] * (wk.transpose() * wk));
    }
    return next;
  };
  return detail::drive("natural_gradient", cfg, std::move(start), ctx.det_floor, step, evaluate);
}

}  // namespace ivakit
