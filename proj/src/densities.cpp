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

#include "ivakit/densities.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "ivakit/error.hpp"

namespace ivakit {

namespace {

constexpr double kLogPi = 1.1447298858494002;  // log(pi)
constexpr double kLog2 = std::numbers::ln2;
constexpr double kLog2Pi = 1.8378770664093453;  // log(2 pi)

template <typename... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};

double log_cosh(double r) {
  const double a = std::abs(r);
  return a + std::log1p(std::exp(-2.0 * a)) - kLog2;
}

}  // namespace

std::string_view to_string(Family family) {
  switch (family) {
    case Family::kGaussian: return "gaussian";
    case Family::kLaplace: return "laplace";
    case Family::kStudentT: return "student_t";
    case Family::kKotz: return "kotz";
    case Family::kMggd: return "mggd";
    case Family::kMixed: return "mixed";
    case Family::kSuperGaussianRadial: return "super_gaussian";
  }
  return "unknown";
}

Family family_from_string(std::string_view name) {
  for (Family f : {Family::kGaussian, Family::kLaplace, Family::kStudentT, Family::kKotz,
                   Family::kMggd, Family::kMixed, Family::kSuperGaussianRadial})
    if (to_string(f) == name) return f;
  fail(ErrorCode::kParameter, "unknown density family '" + std::string(name) + "'");
}

std::string_view to_string(RadialProfile profile) {
  switch (profile) {
    case RadialProfile::kLinear: return "linear";
    case RadialProfile::kLogCosh: return "log_cosh";
    case RadialProfile::kPower: return "power";
  }
  return "unknown";
}

RadialProfile radial_profile_from_string(std::string_view name) {
  for (RadialProfile p : {RadialProfile::kLinear, RadialProfile::kLogCosh, RadialProfile::kPower})
    if (to_string(p) == name) return p;
  fail(ErrorCode::kParameter, "unknown radial profile '" + std::string(name) + "'");
}

RadialValue radial_profile_eval(const RadialParams& params, double r) {
  const double s = params.scale;
  r = std::abs(r);
  switch (params.profile) {
    case RadialProfile::kLinear:
      return {s * r, s, 0.0};
    case RadialProfile::kLogCosh: {
      const double t = std::tanh(r);
      return {s * log_cosh(r), s * t, s * (1.0 - t * t)};
    }
    case RadialProfile::kPower: {
      const double b = params.shape;
      return {s * std::pow(r, b), s * b * std::pow(r, b - 1.0),
              s * b * (b - 1.0) * std::pow(r, b - 2.0)};
    }
  }
  return {0.0, 0.0, 0.0};
}

double radial_weight(const RadialParams& params, double r) {
  r = std::abs(r);
  switch (params.profile) {
    case RadialProfile::kLinear:
      return params.scale / std::max(r, kRadiusFloor);
    case RadialProfile::kLogCosh:
      if (r < 1e-4) return params.scale * (1.0 - r * r / 3.0);
      return params.scale * std::tanh(r) / r;
    case RadialProfile::kPower:
      return params.scale * params.shape * std::pow(std::max(r, kRadiusFloor), params.shape - 2.0);
  }
  return 0.0;
}

// ---------------------------------------------------------------------------
// DensityModel construction

void DensityModel::init_scatter(Vector location, Matrix scatter) {
  const Eigen::Index k = location.size();
  require(k >= 1, ErrorCode::kParameter, "density dimension must be positive");
  require(scatter.rows() == k && scatter.cols() == k, ErrorCode::kParameter,
          "scatter must be " + std::to_string(k) + "x" + std::to_string(k));
  require(location.allFinite() && scatter.allFinite(), ErrorCode::kParameter,
          "density parameters must be finite");
  const double scale = std::max(1.0, scatter.cwiseAbs().maxCoeff());
  require((scatter - scatter.transpose()).cwiseAbs().maxCoeff() <= 1e-10 * scale,
          ErrorCode::kParameter, "scatter matrix is not symmetric");
  Eigen::LLT<Matrix> llt(scatter);
  require(llt.info() == Eigen::Success && llt.matrixL().toDenseMatrix().diagonal().minCoeff() > 0.0,
          ErrorCode::kParameter, "scatter matrix is not positive definite");
  location_ = std::move(location);
  scatter_ = std::move(scatter);
  scatter_inv_ = llt.solve(Matrix::Identity(k, k));
  scatter_inv_ = (0.5 * (scatter_inv_ + scatter_inv_.transpose())).eval();
  log_det_scatter_ = 2.0 * llt.matrixL().toDenseMatrix().diagonal().array().log().sum();
}

void DensityModel::init_normalizer() {
  const double kd = dimension();
  const double half_logdet = 0.5 * log_det_scatter_;
  switch (family_) {
    case Family::kGaussian:
      log_normalizer_ = -0.5 * kd * kLog2Pi - half_logdet;
      break;
    case Family::kLaplace:
      log_normalizer_ =
          -half_logdet - std::lgamma(0.5 * (kd + 1.0)) - kd * kLog2 - 0.5 * (kd - 1.0) * kLogPi;
      break;
    case Family::kStudentT: {
      const double nu = std::get<StudentTParams>(params_).nu;
      log_normalizer_ = std::lgamma(0.5 * (nu + kd)) - std::lgamma(0.5 * nu) -
                        0.5 * kd * (std::log(nu) + kLogPi) - half_logdet;
      break;
    }
    case Family::kKotz: {
      const auto& t = std::get<KotzParams>(params_);
      const double nu = (2.0 * t.eta + kd - 2.0) / (2.0 * t.beta);
      log_normalizer_ = std::lgamma(0.5 * kd) + std::log(t.beta) + nu * std::log(t.lambda) -
                        half_logdet - std::lgamma(nu) - 0.5 * kd * kLogPi;
      break;
    }
    case Family::kMggd: {
      const auto& m = std::get<MggdParams>(params_);
      log_normalizer_ = std::lgamma(0.5 * kd) + std::log(m.beta) - half_logdet -
                        std::lgamma(kd / (2.0 * m.beta)) - 0.5 * kd * kLogPi -
                        0.5 * kd * std::log(m.alpha);
      break;
    }
    case Family::kSuperGaussianRadial:
    case Family::kMixed:
      log_normalizer_ = 0.0;
      break;
  }
}

DensityModel DensityModel::gaussian(Vector location, Matrix scatter) {
  DensityModel m;
  m.family_ = Family::kGaussian;
  m.init_scatter(std::move(location), std::move(scatter));
  m.init_normalizer();
  return m;
}

DensityModel DensityModel::gaussian(int k_dim) {
  return gaussian(Vector::Zero(k_dim), Matrix::Identity(k_dim, k_dim));
}

DensityModel DensityModel::laplace(Vector location, Matrix scatter) {
  DensityModel m;
  m.family_ = Family::kLaplace;
  m.init_scatter(std::move(location), std::move(scatter));
  m.init_normalizer();
  return m;
}

DensityModel DensityModel::laplace(int k_dim) {
  return laplace(Vector::Zero(k_dim), Matrix::Identity(k_dim, k_dim));
}

DensityModel DensityModel::student_t(Vector location, Matrix scatter, double nu) {
  require(nu > 0.0 && std::isfinite(nu), ErrorCode::kParameter, "Student-t requires nu > 0");
  DensityModel m;
  m.family_ = Family::kStudentT;
  m.params_ = StudentTParams{nu};
  m.init_scatter(std::move(location), std::move(scatter));
  m.init_normalizer();
  return m;
}

DensityModel DensityModel::kotz(Vector location, Matrix scatter, KotzParams params) {
  const double kd = static_cast<double>(location.size());
  require(params.beta > 0.0, ErrorCode::kParameter, "Kotz requires beta > 0");
  require(params.lambda > 0.0, ErrorCode::kParameter, "Kotz requires lambda > 0");
  require(params.eta > (2.0 - kd) / 2.0, ErrorCode::kParameter, "Kotz requires eta > (2 - K) / 2");
  require((2.0 * params.eta + kd - 2.0) / (2.0 * params.beta) > 0.0, ErrorCode::kParameter,
          "Kotz requires (2 eta + K - 2) / (2 beta) > 0");
  DensityModel m;
  m.family_ = Family::kKotz;
  m.params_ = params;
  m.init_scatter(std::move(location), std::move(scatter));
  m.init_normalizer();
  return m;
}

DensityModel DensityModel::mggd(Vector location, Matrix scatter, MggdParams params) {
  require(params.alpha > 0.0 && params.beta > 0.0, ErrorCode::kParameter,
          "MGGD requires alpha > 0 and beta > 0");
  DensityModel m;
  m.family_ = Family::kMggd;
  m.params_ = params;
  m.init_scatter(std::move(location), std::move(scatter));
  m.init_normalizer();
  return m;
}

DensityModel DensityModel::mixed(double epsilon, DensityModel component_a, DensityModel component_b) {
  require(epsilon >= 0.0 && epsilon <= 1.0, ErrorCode::kParameter,
          "mixture weight must lie in [0, 1]");
  require(component_a.dimension() == component_b.dimension(), ErrorCode::kParameter,
          "mixture components must share the dimension");
  require(component_a.family() != Family::kSuperGaussianRadial &&
              component_b.family() != Family::kSuperGaussianRadial,
          ErrorCode::kParameter, "mixture components need normalized densities");
  DensityModel m;
  m.family_ = Family::kMixed;
  // Location and scatter of a mixture are reported from component a.
  m.location_ = component_a.location_;
  m.scatter_ = component_a.scatter_;
  m.scatter_inv_ = component_a.scatter_inv_;
  m.log_det_scatter_ = component_a.log_det_scatter_;
  m.params_ = MixedParams{epsilon, std::make_shared<const DensityModel>(std::move(component_a)),
                          std::make_shared<const DensityModel>(std::move(component_b))};
  return m;
}

DensityModel DensityModel::super_gaussian(int k_dim, RadialParams params) {
  return super_gaussian(Vector::Zero(k_dim), Matrix::Identity(k_dim, k_dim), params);
}

DensityModel DensityModel::super_gaussian(Vector location, Matrix scatter, RadialParams params) {
  require(params.scale > 0.0, ErrorCode::kParameter, "radial profile scale must be positive");
  if (params.profile == RadialProfile::kPower)
    require(params.shape > 0.0 && params.shape < 2.0, ErrorCode::kParameter,
            "power radial profile needs shape in (0, 2)");
  DensityModel m;
  m.family_ = Family::kSuperGaussianRadial;
  m.params_ = params;
  m.init_scatter(std::move(location), std::move(scatter));
  m.init_normalizer();
  return m;
}

DensityModel DensityModel::with_scatter(const Matrix& scatter) const {
  switch (family_) {
    case Family::kGaussian: return gaussian(location_, scatter);
    case Family::kLaplace: return laplace(location_, scatter);
    case Family::kStudentT: return student_t(location_, scatter, std::get<StudentTParams>(params_).nu);
    case Family::kKotz: return kotz(location_, scatter, std::get<KotzParams>(params_));
    case Family::kMggd: return mggd(location_, scatter, std::get<MggdParams>(params_));
    case Family::kSuperGaussianRadial:
      return super_gaussian(location_, scatter, std::get<RadialParams>(params_));
    case Family::kMixed: {
      const auto& mp = std::get<MixedParams>(params_);
      return mixed(mp.epsilon, mp.component_a->with_scatter(scatter),
                   mp.component_b->with_scatter(scatter));
    }
  }
  fail(ErrorCode::kParameter, "unknown family");
}

bool DensityModel::singular_at_center() const {
  switch (family_) {
    case Family::kGaussian:
    case Family::kStudentT:
      return false;
    case Family::kLaplace:
      return true;
    case Family::kKotz: {
      const auto& t = std::get<KotzParams>(params_);
      return t.eta != 1.0 || t.beta < 1.0;
    }
    case Family::kMggd:
      return std::get<MggdParams>(params_).beta < 1.0;
    case Family::kSuperGaussianRadial:
      return std::get<RadialParams>(params_).profile != RadialProfile::kLogCosh;
    case Family::kMixed: {
      const auto& mp = std::get<MixedParams>(params_);
      return mp.component_a->singular_at_center() || mp.component_b->singular_at_center();
    }
  }
  return false;
}

// ---------------------------------------------------------------------------
// Elliptical kernel

DensityModel::RadialTerms DensityModel::radial_terms(double q) const {
  const double kd = dimension();
  switch (family_) {
    case Family::kGaussian:
      return {0.5 * q, 0.5, 0.0};
    case Family::kLaplace: {
      const double s = std::sqrt(q);
      return {s, 0.5 / s, -0.25 / (s * q)};
    }
    case Family::kStudentT: {
      const double nu = std::get<StudentTParams>(params_).nu;
      const double a = 0.5 * (nu + kd);
      return {a * std::log1p(q / nu), a / (nu + q), -a / ((nu + q) * (nu + q))};
    }
    case Family::kKotz: {
      const auto& t = std::get<KotzParams>(params_);
      const double c = 1.0 - t.eta;
      const double qb = std::pow(q, t.beta);
      double g = t.lambda * qb;
      double d1 = t.lambda * t.beta * qb / q;
      double d2 = t.lambda * t.beta * (t.beta - 1.0) * qb / (q * q);
      if (c != 0.0) {
        g += c * std::log(q);
        d1 += c / q;
        d2 -= c / (q * q);
      }
      return {g, d1, d2};
    }
    case Family::kMggd: {
      const auto& m = std::get<MggdParams>(params_);
      const double qa = q / m.alpha;
      const double qab = std::pow(qa, m.beta);
      return {qab, m.beta * qab / q, m.beta * (m.beta - 1.0) * qab / (q * q)};
    }
    case Family::kSuperGaussianRadial: {
      const auto& rp = std::get<RadialParams>(params_);
      const double r = std::sqrt(q);
      if (rp.profile == RadialProfile::kPower) {
        const double h = 0.5 * rp.shape;
        const double qh = std::pow(q, h);
        return {rp.scale * qh, rp.scale * h * qh / q, rp.scale * h * (h - 1.0) * qh / (q * q)};
      }
      const RadialValue v = radial_profile_eval(rp, r);
      if (rp.profile == RadialProfile::kLogCosh && r < 1e-4) {
        const double r2 = r * r;
        return {v.g, 0.5 * rp.scale * (1.0 - r2 / 3.0), 0.25 * rp.scale * (-2.0 / 3.0 + 8.0 * r2 / 15.0)};
      }
      return {v.g, 0.5 * v.d1 / r, 0.25 * (v.d2 * r - v.d1) / (r * q)};
    }
    case Family::kMixed:
      break;
  }
  fail(ErrorCode::kParameter, "radial terms are not defined for mixture models");
}

double DensityModel::log_density(const Vector& y) const {
  require(y.size() == dimension(), ErrorCode::kShape, "point dimension does not match the model");
  require(y.allFinite(), ErrorCode::kDataValidation, "density evaluated at a non-finite point");
  if (family_ == Family::kMixed) {
    const auto& mp = std::get<MixedParams>(params_);
    const double la = std::log(mp.epsilon) + mp.component_a->log_density(y);
    const double lb = std::log1p(-mp.epsilon) + mp.component_b->log_density(y);
    const double hi = std::max(la, lb);
    if (hi == -std::numeric_limits<double>::infinity()) return hi;
    return hi + std::log1p(std::exp(std::min(la, lb) - hi));
  }
  const Vector d = y - location_;
  const double q = d.dot(scatter_inv_ * d);
  if (q <= 0.0 && family_ == Family::kKotz) {
    const double eta = std::get<KotzParams>(params_).eta;
    if (eta < 1.0) fail(ErrorCode::kSingularity, "Kotz density with eta < 1 is infinite at its location");
    if (eta > 1.0) return -std::numeric_limits<double>::infinity();
  }
  if (q <= 0.0) {
    // g(0) is finite for every remaining family; evaluate the limit directly.
    switch (family_) {
      case Family::kSuperGaussianRadial:
        return -radial_profile_eval(std::get<RadialParams>(params_), 0.0).g;
      default:
        return log_normalizer_;
    }
  }
  return log_normalizer_ - radial_terms(q).g;
}

Vector DensityModel::score(const Vector& y) const {
  require(y.size() == dimension(), ErrorCode::kShape, "point dimension does not match the model");
  require(y.allFinite(), ErrorCode::kDataValidation, "score evaluated at a non-finite point");
  if (family_ == Family::kMixed) {
    const auto& mp = std::get<MixedParams>(params_);
    const double la = std::log(mp.epsilon) + mp.component_a->log_density(y);
    const double lb = std::log1p(-mp.epsilon) + mp.component_b->log_density(y);
    const double lse = log_density(y);
    const double pa = std::exp(la - lse);
    const double pb = std::exp(lb - lse);
    Vector out = Vector::Zero(dimension());
    if (pa > 0.0) out += pa * mp.component_a->score(y);
    if (pb > 0.0) out += pb * mp.component_b->score(y);
    return out;
  }
  const Vector d = y - location_;
  const Vector z = scatter_inv_ * d;
  const double q = d.dot(z);
  if (q <= 0.0) {
    if (singular_at_center())
      fail(ErrorCode::kSingularity,
           std::string(to_string(family_)) + " score is singular at the location");
    return Vector::Zero(dimension());
  }
  return 2.0 * radial_terms(q).d1 * z;
}

Matrix DensityModel::score_jacobian(const Vector& y) const {
  require(y.size() == dimension(), ErrorCode::kShape, "point dimension does not match the model");
  require(y.allFinite(), ErrorCode::kDataValidation, "Jacobian evaluated at a non-finite point");
  if (family_ == Family::kMixed) {
    const auto& mp = std::get<MixedParams>(params_);
    const double la = std::log(mp.epsilon) + mp.component_a->log_density(y);
    const double lb = std::log1p(-mp.epsilon) + mp.component_b->log_density(y);
    const double lse = log_density(y);
    const double pa = std::exp(la - lse);
    const double pb = std::exp(lb - lse);
    const int k = dimension();
    Matrix jac = Matrix::Zero(k, k);
    Matrix outer = Matrix::Zero(k, k);
    Vector phi = Vector::Zero(k);
    if (pa > 0.0) {
      const Vector sa = mp.component_a->score(y);
      jac += pa * mp.component_a->score_jacobian(y);
      outer += pa * sa * sa.transpose();
      phi += pa * sa;
    }
    if (pb > 0.0) {
      const Vector sb = mp.component_b->score(y);
      jac += pb * mp.component_b->score_jacobian(y);
      outer += pb * sb * sb.transpose();
      phi += pb * sb;
    }
    return jac - outer + phi * phi.transpose();
  }
  const Vector d = y - location_;
  const Vector z = scatter_inv_ * d;
  const double q = d.dot(z);
  if (q <= 0.0) {
    if (singular_at_center())
      fail(ErrorCode::kSingularity,
           std::string(to_string(family_)) + " score Jacobian is singular at the location");
    return 2.0 * radial_terms(std::numeric_limits<double>::min()).d1 * scatter_inv_;
  }
  const RadialTerms t = radial_terms(q);
  return 2.0 * t.d1 * scatter_inv_ + 4.0 * t.d2 * z * z.transpose();
}

BatchEvaluation DensityModel::evaluate(const Matrix& y, bool want_score, bool want_jacobian) const {
  require(y.rows() == dimension(), ErrorCode::kShape, "SCV block dimension does not match the model");
  const Eigen::Index n = y.cols();
  const int k = dimension();
  BatchEvaluation out;
  out.neg_log_density.resize(n);
  if (want_score) out.score.resize(k, n);
  if (want_jacobian) out.jacobian.resize(k * k, n);

  if (family_ == Family::kMixed) {
    const auto& mp = std::get<MixedParams>(params_);
    const bool need_parts = want_score || want_jacobian;
    const BatchEvaluation a = mp.component_a->evaluate(y, need_parts, want_jacobian);
    const BatchEvaluation b = mp.component_b->evaluate(y, need_parts, want_jacobian);
    const double log_eps_a = std::log(mp.epsilon);
    const double log_eps_b = std::log1p(-mp.epsilon);
    for (Eigen::Index i = 0; i < n; ++i) {
      const double la = log_eps_a - a.neg_log_density(i);
      const double lb = log_eps_b - b.neg_log_density(i);
      const double hi = std::max(la, lb);
      const double lse = hi + std::log1p(std::exp(std::min(la, lb) - hi));
      out.neg_log_density(i) = -lse;
      if (!need_parts) continue;
      const double pa = std::exp(la - lse);
      const double pb = std::exp(lb - lse);
      Vector phi = Vector::Zero(k);
      if (pa > 0.0) phi += pa * a.score.col(i);
      if (pb > 0.0) phi += pb * b.score.col(i);
      if (want_score) out.score.col(i) = phi;
      if (want_jacobian) {
        Matrix jac = Matrix::Zero(k, k);
        if (pa > 0.0) {
          const Vector sa = a.score.col(i);
          jac += pa * (Eigen::Map<const Matrix>(a.jacobian.col(i).data(), k, k) - sa * sa.transpose());
        }
        if (pb > 0.0) {
          const Vector sb = b.score.col(i);
          jac += pb * (Eigen::Map<const Matrix>(b.jacobian.col(i).data(), k, k) - sb * sb.transpose());
        }
        jac += phi * phi.transpose();
        out.jacobian.col(i) = Eigen::Map<const Vector>(jac.data(), k * k);
      }
    }
    return out;
  }

  bool clamp = singular_at_center();
  if (family_ == Family::kKotz && std::get<KotzParams>(params_).eta != 1.0) clamp = true;
  const double q_floor = kRadiusFloor * kRadiusFloor;

  const Matrix d = y.colwise() - location_;
  const Matrix z = scatter_inv_ * d;
  for (Eigen::Index i = 0; i < n; ++i) {
    double q = d.col(i).dot(z.col(i));
    if (clamp) q = std::max(q, q_floor);
    if (q <= 0.0) {
      // Non-singular families at the exact location.
      const double g0 = family_ == Family::kSuperGaussianRadial
                            ? radial_profile_eval(std::get<RadialParams>(params_), 0.0).g
                            : 0.0;
      out.neg_log_density(i) = g0 - log_normalizer_;
      const RadialTerms t0 = radial_terms(std::numeric_limits<double>::min());
      if (want_score) out.score.col(i).setZero();
      if (want_jacobian) {
        const Matrix jac = 2.0 * t0.d1 * scatter_inv_;
        out.jacobian.col(i) = Eigen::Map<const Vector>(jac.data(), k * k);
      }
      continue;
    }
    const RadialTerms t = radial_terms(q);
    out.neg_log_density(i) = t.g - log_normalizer_;
    if (want_score) out.score.col(i) = 2.0 * t.d1 * z.col(i);
    if (want_jacobian) {
      const Matrix jac = 2.0 * t.d1 * scatter_inv_ + 4.0 * t.d2 * z.col(i) * z.col(i).transpose();
      out.jacobian.col(i) = Eigen::Map<const Vector>(jac.data(), k * k);
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// FastIVA nonlinearities

std::string_view to_string(NonlinearityChoice choice) {
  switch (choice) {
    case NonlinearityChoice::kG1Log: return "G1";
    case NonlinearityChoice::kG2Sqrt: return "G2";
    case NonlinearityChoice::kG3Mixed: return "G3";
    case NonlinearityChoice::kG4CubeRoot: return "G4";
  }
  return "unknown";
}

NonlinearityChoice nonlinearity_from_string(std::string_view name) {
  for (NonlinearityChoice c : {NonlinearityChoice::kG1Log, NonlinearityChoice::kG2Sqrt,
                               NonlinearityChoice::kG3Mixed, NonlinearityChoice::kG4CubeRoot})
    if (to_string(c) == name) return c;
  fail(ErrorCode::kParameter, "unknown FastIVA nonlinearity '" + std::string(name) + "'");
}

FastIvaNonlinearity::FastIvaNonlinearity(NonlinearityChoice choice, int k_dim)
    : choice_(choice), k_dim_(k_dim) {
  require(k_dim >= 1, ErrorCode::kParameter, "nonlinearity dimension must be positive");
}

NonlinearityValue FastIvaNonlinearity::eval(double u) const {
  if (!(u > 0.0)) fail(ErrorCode::kDomain, "FastIVA nonlinearity needs u > 0");
  switch (choice_) {
    case NonlinearityChoice::kG1Log:
      return {std::log(u), 1.0 / u, -1.0 / (u * u)};
    case NonlinearityChoice::kG2Sqrt: {
      const double s = std::sqrt(u);
      return {s, 0.5 / s, -0.25 / (u * s)};
    }
    case NonlinearityChoice::kG3Mixed: {
      const double kd = k_dim_;
      const double a = std::sqrt(2.0 / kd);
      const double b = kd - 0.5;
      const double s = std::sqrt(u);
      return {a * s + b * std::log(u), 0.5 * a / s + b / u, -0.25 * a / (u * s) - b / (u * u)};
    }
    case NonlinearityChoice::kG4CubeRoot: {
      const double c = std::cbrt(u);
      return {c, c / (3.0 * u), -2.0 * c / (9.0 * u * u)};
    }
  }
  return {0.0, 0.0, 0.0};
}

// ---------------------------------------------------------------------------

Matrix estimate_scatter(const Matrix& scv_samples, double ridge) {
  const Eigen::Index k = scv_samples.rows();
  const Eigen::Index n = scv_samples.cols();
  require(ridge >= 0.0, ErrorCode::kParameter, "scatter ridge must be nonnegative");
  if (n <= k && ridge == 0.0)
    fail(ErrorCode::kRankDeficiency, "scatter estimate needs more samples (" + std::to_string(n) +
                                         ") than dimensions (" + std::to_string(k) + ")");
  const Vector mean = scv_samples.rowwise().mean();
  const Matrix centered = scv_samples.colwise() - mean;
  Matrix cov = centered * centered.transpose() / static_cast<double>(n);
  cov = (0.5 * (cov + cov.transpose())).eval();
  if (ridge > 0.0) cov.diagonal().array() += ridge * cov.trace() / static_cast<double>(k);
  return cov;
}

}  // namespace ivakit
