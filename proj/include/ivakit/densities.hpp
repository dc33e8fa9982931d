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

#include <memory>
#include <string>
#include <string_view>
#include <variant>

#include "ivakit/types.hpp"

namespace ivakit {

enum class Family { kGaussian, kLaplace, kStudentT, kKotz, kMggd, kMixed, kSuperGaussianRadial };

std::string_view to_string(Family family);
Family family_from_string(std::string_view name);

struct StudentTParams {
  double nu = 1.0;
};

/// theta = [beta, eta, lambda].
struct KotzParams {
  double beta = 1.0;
  double eta = 1.0;
  double lambda = 0.5;
};

struct MggdParams {
  double alpha = 2.0;
  double beta = 1.0;
};

/// Radial profiles G_R admissible for super-Gaussian spherical models. Each is
/// scaled by `scale`; `shape` is only used by kPower (G_R(r) = r^shape with
/// shape in (0, 2)).
enum class RadialProfile { kLinear, kLogCosh, kPower };

std::string_view to_string(RadialProfile profile);
RadialProfile radial_profile_from_string(std::string_view name);

struct RadialParams {
  RadialProfile profile = RadialProfile::kLinear;
  double scale = 1.0;
  double shape = 1.0;
};

struct RadialValue {
  double g;    // G_R(r)
  double d1;   // G_R'(r)
  double d2;   // G_R''(r)
};

/// G_R and its first two derivatives at r >= 0.
RadialValue radial_profile_eval(const RadialParams& params, double r);

/// G_R'(r) / r, with the finite limit at r = 0 where one exists. The radius is
/// clamped to kRadiusFloor for profiles that are singular at the origin.
double radial_weight(const RadialParams& params, double r);

class DensityModel;

struct MixedParams {
  double epsilon = 0.5;
  std::shared_ptr<const DensityModel> component_a;
  std::shared_ptr<const DensityModel> component_b;
};

using FamilyParams =
    std::variant<std::monostate, StudentTParams, KotzParams, MggdParams, MixedParams, RadialParams>;

/// Radius floor used inside optimizer loops for densities whose score is
/// singular at the location.
inline constexpr double kRadiusFloor = 1e-12;

/// Per-sample evaluation of one SCV block (K x n).
struct BatchEvaluation {
  Vector neg_log_density;  // n
  Matrix score;            // K x n
  Matrix jacobian;         // (K*K) x n, entry (a*K + b) is d phi_a / d y_b
};

/// Source density of a K-dimensional SCV.
///
/// Elliptical families (Gaussian, Laplace, Student-t, Kotz, MGGD) and the
/// super-Gaussian radial family are written as log p(y) = c - g(q) with
/// q = (y - mu)^T Sigma^{-1} (y - mu). The score is phi = 2 g'(q) Sigma^{-1}(y - mu)
/// and its Jacobian 2 g'(q) Sigma^{-1} + 4 g''(q) z z^T with z = Sigma^{-1}(y - mu).
/// The radial family uses r = sqrt(q); with the default identity scatter and
/// zero location this is the Euclidean norm, and its log-density -G_R(r) is
/// left unnormalized.
///
/// Mixed models combine two normalized components; the score is the exact
/// derivative of log(eps f_a + (1 - eps) f_b), i.e. the posterior-weighted
/// combination of the component scores.
///
/// Values are immutable; inverse scatter, log-determinant and the log
/// normalizer are cached at construction.
class DensityModel {
 public:
  static DensityModel gaussian(Vector location, Matrix scatter);
  static DensityModel gaussian(int k_dim);
  static DensityModel laplace(Vector location, Matrix scatter);
  static DensityModel laplace(int k_dim);
  static DensityModel student_t(Vector location, Matrix scatter, double nu);
  static DensityModel kotz(Vector location, Matrix scatter, KotzParams params);
  static DensityModel mggd(Vector location, Matrix scatter, MggdParams params);
  static DensityModel mixed(double epsilon, DensityModel component_a, DensityModel component_b);
  static DensityModel super_gaussian(int k_dim, RadialParams params = {});
  static DensityModel super_gaussian(Vector location, Matrix scatter, RadialParams params);

  Family family() const noexcept { return family_; }
  int dimension() const noexcept { return static_cast<int>(location_.size()); }
  const Vector& location() const noexcept { return location_; }
  const Matrix& scatter() const noexcept { return scatter_; }
  const FamilyParams& params() const noexcept { return params_; }

  /// Same family and parameters with a new scatter matrix (mixed models
  /// forward it to both components).
  DensityModel with_scatter(const Matrix& scatter) const;

  /// True when the score (and hence the Hessian) is singular at y = location.
  bool singular_at_center() const;

  double log_density(const Vector& y) const;
  Vector score(const Vector& y) const;
  Matrix score_jacobian(const Vector& y) const;

  /// Batch evaluation for optimizer loops. Singular points are handled by
  /// clamping the radius at kRadiusFloor instead of throwing.
  BatchEvaluation evaluate(const Matrix& y, bool want_score, bool want_jacobian) const;

 private:
  DensityModel() = default;
  void init_scatter(Vector location, Matrix scatter);
  void init_normalizer();

  struct RadialTerms {
    double g, d1, d2;  // g(q), g'(q), g''(q)
  };
  RadialTerms radial_terms(double q) const;

  Family family_ = Family::kGaussian;
  Vector location_;
  Matrix scatter_;
  Matrix scatter_inv_;
  double log_det_scatter_ = 0.0;
  double log_normalizer_ = 0.0;
  FamilyParams params_;
};

/// FastIVA nonlinearities G(u), u = sum_k |s^[k]|^2 > 0.
enum class NonlinearityChoice { kG1Log, kG2Sqrt, kG3Mixed, kG4CubeRoot };

std::string_view to_string(NonlinearityChoice choice);
NonlinearityChoice nonlinearity_from_string(std::string_view name);

struct NonlinearityValue {
  double g, d1, d2;
};

class FastIvaNonlinearity {
 public:
  /// `k_dim` is only used by G3 (sqrt(2/K) sqrt(u) + (K - 1/2) log u).
  explicit FastIvaNonlinearity(NonlinearityChoice choice, int k_dim = 1);

  NonlinearityChoice choice() const noexcept { return choice_; }
  int k_dim() const noexcept { return k_dim_; }

  /// Throws kDomain for u <= 0.
  NonlinearityValue eval(double u) const;

 private:
  NonlinearityChoice choice_;
  int k_dim_;
};

/// Sample covariance (1/n, about the row means) of a K x n SCV block plus
/// ridge * trace / K on the diagonal.
Matrix estimate_scatter(const Matrix& scv_samples, double ridge);

}  // namespace ivakit
