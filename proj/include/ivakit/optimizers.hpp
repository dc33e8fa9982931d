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

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "ivakit/densities.hpp"
#include "ivakit/error.hpp"
#include "ivakit/objective.hpp"

namespace ivakit {

enum class InitKind { kIdentity, kRandomOrthogonal, kProvided };

std::string_view to_string(InitKind kind);
InitKind init_kind_from_string(std::string_view name);

struct IterationInfo {
  int iteration;  // 1-based
  int stage;
  const UnmixingSet& unmixing;
  double cost;
  double criterion;
};

struct OptimizerConfig {
  /// rho in [0, 1]. A zero step never reports convergence.
  double step_size = 1.0;
  int max_iterations = 512;
  double tolerance = 1e-6;
  InitKind init = InitKind::kRandomOrthogonal;
  std::optional<UnmixingSet> initial;  // used with InitKind::kProvided
  /// Relative ridge: ridge * trace / K is added to refreshed scatters.
  double scatter_ridge = 1e-8;
  bool hessian_fallback = true;
  std::uint64_t seed = 0;
  /// Re-estimate the scatter of Gaussian models once per outer iteration.
  bool refresh_gaussian_scatter = true;
  std::function<void(const IterationInfo&)> observer;

  static OptimizerConfig newton_defaults() { return {}; }
  static OptimizerConfig gradient_defaults() {
    OptimizerConfig c;
    c.step_size = 0.1;
    return c;
  }

  void validate() const;
};

struct ConvergenceReport {
  std::string algorithm;
  int iterations_run = 0;
  bool converged = false;
  std::vector<double> cost_trace;       // initial point plus one entry per iteration
  std::vector<double> criterion_trace;  // one entry per iteration
  std::vector<int> stage_trace;         // stage of each cost_trace entry (1-based)
  double final_cost = 0.0;
  double wall_time_seconds = 0.0;
  std::uint64_t seed = 0;
  std::string failure;  // empty on success
};

struct OptimizerResult {
  UnmixingSet unmixing;
  ConvergenceReport report;
};

/// Raised when a run aborts; carries the report and iterate up to the failure.
class OptimizerError : public Error {
 public:
  OptimizerError(ErrorCode code, const std::string& message, ConvergenceReport partial,
                 UnmixingSet last)
      : Error(code, message), partial_(std::move(partial)), last_(std::move(last)) {}

  const ConvergenceReport& partial_report() const noexcept { return partial_; }
  const UnmixingSet& last_unmixing() const noexcept { return last_; }

 private:
  ConvergenceReport partial_;
  UnmixingSet last_;
};

/// max over k, j of 1 - |cos angle(w_j^[k] prev, w_j^[k] next)|.
double convergence_criterion(const UnmixingSet& prev, const UnmixingSet& next);

/// Starting point chosen by cfg.init. Random starts draw one Haar orthogonal
/// matrix per dataset from a stream split off cfg.seed.
UnmixingSet initial_unmixing(const OptimizerConfig& cfg, Eigen::Index p, std::size_t k_count);

/// Models with the scatter of every Gaussian member replaced by the SCV
/// sample covariance (plus ridge); other families are returned unchanged.
std::vector<DensityModel> refresh_gaussian_models(const std::vector<DensityModel>& models,
                                                  const SourceEstimates& sources, double ridge);

OptimizerResult run_natural_gradient(const CostContext& ctx, const OptimizerConfig& cfg);

OptimizerResult run_newton(const CostContext& ctx, const OptimizerConfig& cfg);

/// Data must be white (zero mean, identity covariance per dataset). The cost
/// trace records the contrast sum_j mean G(||s_j||^2).
OptimizerResult run_fastiva(const CostContext& ctx, const OptimizerConfig& cfg,
                            const FastIvaNonlinearity& g);

/// Models must be super-Gaussian radial with zero location and identity
/// scatter. The update is closed form, so step_size is not used.
OptimizerResult run_auxiva(const CostContext& ctx, const OptimizerConfig& cfg);

/// E[G_R'(r) / r x x^T] with r clamped at kRadiusFloor.
Matrix auxiva_weighted_covariance(const Matrix& x, const Vector& radius, const RadialParams& profile);

/// Row j of the iterative-projection update: (W V)^{-1} e_j scaled to
/// w^T V w = 1. Throws kNumericalFailure when W V is singular.
Vector auxiva_row_update(const Matrix& w, const Matrix& v, Eigen::Index j);

enum class IvaGVariant { kMatrixGradient, kVectorGradient, kNewton };

std::string_view to_string(IvaGVariant variant);
IvaGVariant iva_g_variant_from_string(std::string_view name);

/// Gaussian models re-estimated every outer iteration; the trace records
/// iva_g_cost.
OptimizerResult run_iva_g(const DatasetCollection& data, const OptimizerConfig& cfg, IvaGVariant variant);

/// IVA-G (newton) followed by Newton with identity-scatter Laplace models
/// started from the first stage's result. Stage markers are 1 and 2.
OptimizerResult run_iva_gl(const DatasetCollection& data, const OptimizerConfig& cfg);

}  // namespace ivakit
