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

#include <span>
#include <string_view>
#include <vector>

#include "ivakit/densities.hpp"
#include "ivakit/model.hpp"

namespace ivakit {

inline constexpr double kDefaultDetFloor = 1e-12;

/// Data paired with one source model per SCV.
struct CostContext {
  DatasetCollection collection;
  std::vector<DensityModel> models;
  double det_floor = kDefaultDetFloor;

  /// Throws kShape unless there are p models of dimension K.
  void validate() const;
};

/// log|det W| from an LU factorization; throws kNearSingularUnmixing when
/// |det W| < det_floor.
double log_abs_det(const Matrix& w, double det_floor = kDefaultDetFloor);

/// Sum with a fixed-fan-in pairwise tree, independent of thread count.
double pairwise_sum(const Vector& values);

/// Per-SCV average negative log-density, sum_j mean_i[-log p_j(s_ji)].
Vector scv_neg_log_likelihoods(const CostContext& ctx, const SourceEstimates& sources);

/// sum_j mean_i[-log p_j(s_ji)] - sum_k log|det W^[k]|.
double iva_cost(const CostContext& ctx, const UnmixingSet& unmixing);

/// E[phi^[k](s) (x^[k])^T] - (W^[k])^{-T}.
Matrix iva_gradient(const CostContext& ctx, const UnmixingSet& unmixing, std::size_t k);

/// All K gradients at once (sources and scores are evaluated a single time).
MatrixList iva_gradients(const CostContext& ctx, const UnmixingSet& unmixing);

/// iva_gradient * (W^[k])^T W^[k].
Matrix natural_gradient(const CostContext& ctx, const UnmixingSet& unmixing, std::size_t k);

/// Unit vector h with W~_j h = 0 (W~_j is W without row j) and h^T w_j > 0.
/// Throws kDegenerateUnmixing when W~_j is rank deficient.
Vector decoupling_vector(const Matrix& w, Eigen::Index j);

struct RowDerivatives {
  Vector gradient;  // pK, block k = d cost / d w_j^[k]
  Matrix hessian;   // pK x pK, empty unless requested
};

/// Gradient (and optionally Hessian) of the cost with respect to the stacked
/// row j of all K unmixing matrices, other rows frozen.
RowDerivatives row_derivatives(const CostContext& ctx, const UnmixingSet& unmixing, Eigen::Index j,
                               bool want_hessian);

Vector row_gradient(const CostContext& ctx, const UnmixingSet& unmixing, Eigen::Index j);
Matrix row_hessian(const CostContext& ctx, const UnmixingSet& unmixing, Eigen::Index j);

/// Closed-form cost under Gaussian models with sample SCV covariances:
/// pK log(2 pi e) / 2 + 1/2 sum_j log det Sigma_j - sum_k log|det W^[k]|.
/// A covariance that is not positive definite triggers one retry with a
/// 1e-8 relative ridge before failing with kRankDeficiency.
double iva_g_cost(const UnmixingSet& unmixing, const DatasetCollection& collection,
                  double ridge = 0.0, double det_floor = kDefaultDetFloor);

/// Eigenvalues lambda_{j,k} of every SCV sample covariance (one vector per j).
std::vector<Vector> scv_covariance_eigenvalues(const UnmixingSet& unmixing,
                                               const DatasetCollection& collection);

// --- negentropy approximations ----------------------------------------------

/// Throws kPrecondition unless |mean| <= 1e-6 and |variance - 1| <= 1e-6.
void require_standardized(const Vector& y);

/// (y - mean) / std with the 1/n variance.
Vector standardize(const Vector& y);

/// (1/12) E[y^3]^2 + (1/48) (E[y^4] - 3)^2.
double negentropy_moment_approx(const Vector& y);

enum class NonquadraticG { kLogCosh, kNegGaussExp, kCube, kQuartic };

std::string_view to_string(NonquadraticG g);

double nonquadratic_eval(NonquadraticG g, double y);

/// E[G(nu)] for a standard normal nu.
double gaussian_reference(NonquadraticG g);

struct NegentropyTerm {
  NonquadraticG g;
  double weight;
};

/// (E G(y) - E G(nu))^2.
double negentropy_nonquadratic_approx(const Vector& y, NonquadraticG g);

/// sum_l k_l (E G_l(y) - E G_l(nu))^2.
double negentropy_nonquadratic_approx(const Vector& y, std::span<const NegentropyTerm> terms);

}  // namespace ivakit
