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

#include "ivakit/objective.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "ivakit/error.hpp"

namespace ivakit {

namespace {

constexpr Eigen::Index kLeaf = 64;

double pairwise_sum_range(const double* v, Eigen::Index n) {
  if (n <= kLeaf) {
    double s = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) s += v[i];
    return s;
  }
  const Eigen::Index half = n / 2;
  return pairwise_sum_range(v, half) + pairwise_sum_range(v + half, n - half);
}

double sample_mean(const Vector& v) {
  return pairwise_sum(v) / static_cast<double>(v.size());
}

Matrix unmixing_row_block(const UnmixingSet& unmixing, const DatasetCollection& collection,
                          Eigen::Index j) {
  Matrix s(static_cast<Eigen::Index>(collection.k_count()), collection.sample_count());
  for (std::size_t k = 0; k < collection.k_count(); ++k)
    s.row(static_cast<Eigen::Index>(k)) = unmixing.matrices[k].row(j) * collection.dataset(k);
  return s;
}

void check_shapes(const CostContext& ctx, const UnmixingSet& unmixing) {
  ctx.validate();
  const Eigen::Index p = ctx.collection.channel_count();
  require(unmixing.k_count() == ctx.collection.k_count(), ErrorCode::kShape,
          "unmixing set has " + std::to_string(unmixing.k_count()) + " matrices for " +
              std::to_string(ctx.collection.k_count()) + " datasets");
  for (const Matrix& w : unmixing.matrices)
    require(w.rows() == p && w.cols() == p, ErrorCode::kShape, "unmixing matrix is not p x p");
}

double sum_log_abs_det(const UnmixingSet& unmixing, double det_floor) {
  double s = 0.0;
  for (std::size_t k = 0; k < unmixing.k_count(); ++k) {
    try {
      s += log_abs_det(unmixing.matrices[k], det_floor);
    } catch (const Error& e) {
      fail(e.code(), "dataset " + std::to_string(k) + ": " + e.what());
    }
  }
  return s;
}

}  // namespace

void CostContext::validate() const {
  const auto p = static_cast<std::size_t>(collection.channel_count());
  require(models.size() == p, ErrorCode::kShape,
          "cost context needs " + std::to_string(p) + " models, got " + std::to_string(models.size()));
  for (std::size_t j = 0; j < p; ++j)
    require(static_cast<std::size_t>(models[j].dimension()) == collection.k_count(), ErrorCode::kShape,
            "model " + std::to_string(j) + " has dimension " + std::to_string(models[j].dimension()) +
                ", expected K=" + std::to_string(collection.k_count()));
  require(det_floor > 0.0, ErrorCode::kParameter, "det_floor must be positive");
}

double log_abs_det(const Matrix& w, double det_floor) {
  require(w.rows() == w.cols(), ErrorCode::kShape, "determinant of a non-square matrix");
  const Eigen::PartialPivLU<Matrix> lu(w);
  double log_det = 0.0;
  const auto diag = lu.matrixLU().diagonal();
  for (Eigen::Index i = 0; i < diag.size(); ++i) log_det += std::log(std::abs(diag(i)));
  if (!(log_det >= std::log(det_floor)))
    fail(ErrorCode::kNearSingularUnmixing,
         "|det W| = " + std::to_string(std::exp(log_det)) + " is below the floor " +
             std::to_string(det_floor));
  return log_det;
}

double pairwise_sum(const Vector& values) { return pairwise_sum_range(values.data(), values.size()); }

Vector scv_neg_log_likelihoods(const CostContext& ctx, const SourceEstimates& sources) {
  ctx.validate();
  const Eigen::Index p = sources.source_count();
  Vector out(p);
  for (Eigen::Index j = 0; j < p; ++j)
    out(j) = sample_mean(ctx.models[j].evaluate(sources.scvs[j], false, false).neg_log_density);
  return out;
}

double iva_cost(const CostContext& ctx, const UnmixingSet& unmixing) {
  check_shapes(ctx, unmixing);
  const double log_det = sum_log_abs_det(unmixing, ctx.det_floor);
  Vector terms = scv_neg_log_likelihoods(ctx, apply_unmixing(unmixing, ctx.collection));
  // Summation in sorted order keeps the value bit-identical under relabeling.
  std::sort(terms.begin(), terms.end());
  double total = 0.0;
  for (double t : terms) total += t;
  return total - log_det;
}

MatrixList iva_gradients(const CostContext& ctx, const UnmixingSet& unmixing) {
  check_shapes(ctx, unmixing);
  sum_log_abs_det(unmixing, ctx.det_floor);
  const std::size_t k_count = ctx.collection.k_count();
  const Eigen::Index p = ctx.collection.channel_count();
  const Eigen::Index n = ctx.collection.sample_count();
  const SourceEstimates sources = apply_unmixing(unmixing, ctx.collection);
  MatrixList phi(k_count, Matrix(p, n));
  for (Eigen::Index j = 0; j < p; ++j) {
    const BatchEvaluation e = ctx.models[j].evaluate(sources.scvs[j], true, false);
    for (std::size_t k = 0; k < k_count; ++k) phi[k].row(j) = e.score.row(static_cast<Eigen::Index>(k));
  }
  MatrixList out;
  out.reserve(k_count);
  for (std::size_t k = 0; k < k_count; ++k) {
    const Matrix& w = unmixing.matrices[k];
    Matrix g = phi[k] * ctx.collection.dataset(k).transpose() / static_cast<double>(n);
    g -= w.transpose().partialPivLu().inverse();
    out.push_back(std::move(g));
  }
  return out;
}

Matrix iva_gradient(const CostContext& ctx, const UnmixingSet& unmixing, std::size_t k) {
  require(k < ctx.collection.k_count(), ErrorCode::kShape, "dataset index out of range");
  return iva_gradients(ctx, unmixing)[k];
}

Matrix natural_gradient(const CostContext& ctx, const UnmixingSet& unmixing, std::size_t k) {
  const Matrix& w = unmixing.matrices.at(k);
  return iva_gradient(ctx, unmixing, k) * (w.transpose() * w);
}

Vector decoupling_vector(const Matrix& w, Eigen::Index j) {
  const Eigen::Index p = w.rows();
  require(w.cols() == p && p >= 1, ErrorCode::kShape, "decoupling needs a square matrix");
  require(j >= 0 && j < p, ErrorCode::kShape, "row index out of range");
  Vector h;
  if (p == 1) {
    h = Vector::Ones(1);
  } else {
    Matrix reduced(p - 1, p);
    reduced.topRows(j) = w.topRows(j);
    reduced.bottomRows(p - 1 - j) = w.bottomRows(p - 1 - j);
    const Eigen::JacobiSVD<Matrix> svd(reduced, Eigen::ComputeFullV);
    const Vector& sv = svd.singularValues();
    const double tol = std::max(sv(0), 1e-300) * static_cast<double>(p) *
                       std::numeric_limits<double>::epsilon();
    if (!(sv(p - 2) > tol))
      fail(ErrorCode::kDegenerateUnmixing,
           "rows other than " + std::to_string(j) + " are linearly dependent");
    h = svd.matrixV().col(p - 1);
    h.normalize();
  }
  if (h.dot(w.row(j).transpose()) < 0.0) h = -h;
  return h;
}

RowDerivatives row_derivatives(const CostContext& ctx, const UnmixingSet& unmixing, Eigen::Index j,
                               bool want_hessian) {
  check_shapes(ctx, unmixing);
  const Eigen::Index p = ctx.collection.channel_count();
  require(j >= 0 && j < p, ErrorCode::kShape, "row index out of range");
  const auto k_count = static_cast<Eigen::Index>(ctx.collection.k_count());
  const double n = static_cast<double>(ctx.collection.sample_count());

  const Matrix s = unmixing_row_block(unmixing, ctx.collection, j);
  const BatchEvaluation e = ctx.models[j].evaluate(s, true, want_hessian);

  RowDerivatives out;
  out.gradient.resize(p * k_count);
  std::vector<Vector> h(k_count);
  std::vector<double> hw(k_count);
  for (Eigen::Index k = 0; k < k_count; ++k) {
    const Matrix& w = unmixing.matrices[k];
    h[k] = decoupling_vector(w, j);
    hw[k] = h[k].dot(w.row(j).transpose());
    require(std::abs(hw[k]) > 0.0, ErrorCode::kDegenerateUnmixing,
            "row " + std::to_string(j) + " lies in the span of the other rows");
    const Matrix& x = ctx.collection.dataset(static_cast<std::size_t>(k));
    out.gradient.segment(k * p, p) = x * e.score.row(k).transpose() / n - h[k] / hw[k];
  }
  if (!want_hessian) return out;

  out.hessian.resize(p * k_count, p * k_count);
  for (Eigen::Index k1 = 0; k1 < k_count; ++k1) {
    const Matrix& x1 = ctx.collection.dataset(static_cast<std::size_t>(k1));
    for (Eigen::Index k2 = k1; k2 < k_count; ++k2) {
      const Matrix& x2 = ctx.collection.dataset(static_cast<std::size_t>(k2));
      const Vector weights = e.jacobian.row(k1 * k_count + k2).transpose();
      Matrix block = x1 * weights.asDiagonal() * x2.transpose() / n;
      if (k1 == k2) block += h[k1] * h[k1].transpose() / (hw[k1] * hw[k1]);
      out.hessian.block(k1 * p, k2 * p, p, p) = block;
      if (k2 != k1) out.hessian.block(k2 * p, k1 * p, p, p) = block.transpose();
    }
  }
  return out;
}

Vector row_gradient(const CostContext& ctx, const UnmixingSet& unmixing, Eigen::Index j) {
  return row_derivatives(ctx, unmixing, j, false).gradient;
}

Matrix row_hessian(const CostContext& ctx, const UnmixingSet& unmixing, Eigen::Index j) {
  return row_derivatives(ctx, unmixing, j, true).hessian;
}

std::vector<Vector> scv_covariance_eigenvalues(const UnmixingSet& unmixing,
                                               const DatasetCollection& collection) {
  const SourceEstimates sources = apply_unmixing(unmixing, collection);
  std::vector<Vector> out;
  for (const Matrix& scv : sources.scvs) {
    Eigen::SelfAdjointEigenSolver<Matrix> eig(estimate_scatter(scv, 0.0), Eigen::EigenvaluesOnly);
    out.push_back(eig.eigenvalues());
  }
  return out;
}

double iva_g_cost(const UnmixingSet& unmixing, const DatasetCollection& collection, double ridge,
                  double det_floor) {
  require(unmixing.k_count() == collection.k_count(), ErrorCode::kShape,
          "unmixing/data dataset count mismatch");
  const double log_det_w = sum_log_abs_det(unmixing, det_floor);
  const SourceEstimates sources = apply_unmixing(unmixing, collection);
  const double p = static_cast<double>(sources.source_count());
  const double k = static_cast<double>(collection.k_count());
  double half_log_det = 0.0;
  for (Eigen::Index j = 0; j < sources.source_count(); ++j) {
    Eigen::LLT<Matrix> llt(estimate_scatter(sources.scvs[j], ridge));
    if (llt.info() != Eigen::Success) {
      llt.compute(estimate_scatter(sources.scvs[j], std::max(ridge, 1e-8)));
      require(llt.info() == Eigen::Success, ErrorCode::kRankDeficiency,
              "SCV " + std::to_string(j) + " covariance is not positive definite");
    }
    half_log_det += llt.matrixLLT().diagonal().array().log().sum();
  }
  const double log_2pi_e = std::log(2.0 * std::numbers::pi) + 1.0;
  return 0.5 * p * k * log_2pi_e + half_log_det - log_det_w;
}

// ---------------------------------------------------------------------------

void require_standardized(const Vector& y) {
  require(y.size() >= 2, ErrorCode::kPrecondition, "negentropy needs at least two samples");
  const double mean = sample_mean(y);
  const double var = sample_mean(Vector((y.array() - mean).square()));
  if (!(std::abs(mean) <= 1e-6 && std::abs(var - 1.0) <= 1e-6))
    fail(ErrorCode::kPrecondition, "series is not standardized (mean " + std::to_string(mean) +
                                       ", variance " + std::to_string(var) + ")");
}

Vector standardize(const Vector& y) {
  const double mean = sample_mean(y);
  const Vector c = y.array() - mean;
  const double sd = std::sqrt(sample_mean(Vector(c.array().square())));
  require(sd > 0.0, ErrorCode::kPrecondition, "cannot standardize a constant series");
  return c / sd;
}

double negentropy_moment_approx(const Vector& y) {
  require_standardized(y);
  const double m3 = sample_mean(Vector(y.array().cube()));
  const double kurt = sample_mean(Vector(y.array().square().square())) - 3.0;
  return m3 * m3 / 12.0 + kurt * kurt / 48.0;
}

std::string_view to_string(NonquadraticG g) {
  switch (g) {
    case NonquadraticG::kLogCosh: return "log_cosh";
    case NonquadraticG::kNegGaussExp: return "neg_gauss_exp";
    case NonquadraticG::kCube: return "cube";
    case NonquadraticG::kQuartic: return "quartic";
  }
  return "unknown";
}

double nonquadratic_eval(NonquadraticG g, double y) {
  switch (g) {
    case NonquadraticG::kLogCosh: {
      const double a = std::abs(y);
      return a + std::log1p(std::exp(-2.0 * a)) - std::numbers::ln2;
    }
    case NonquadraticG::kNegGaussExp:
      return -std::exp(-0.5 * y * y);
    case NonquadraticG::kCube:
      return y * y * y;
    case NonquadraticG::kQuartic:
      return y * y * y * y;
  }
  return 0.0;
}

double gaussian_reference(NonquadraticG g) {
  switch (g) {
    case NonquadraticG::kLogCosh: return 0.374567207491438;
    case NonquadraticG::kNegGaussExp: return -0.7071067811865476;  // -1/sqrt(2)
    case NonquadraticG::kCube: return 0.0;
    case NonquadraticG::kQuartic: return 3.0;
  }
  return 0.0;
}

double negentropy_nonquadratic_approx(const Vector& y, NonquadraticG g) {
  const NegentropyTerm term{g, 1.0};
  return negentropy_nonquadratic_approx(y, std::span<const NegentropyTerm>(&term, 1));
}

double negentropy_nonquadratic_approx(const Vector& y, std::span<const NegentropyTerm> terms) {
  require_standardized(y);
  double total = 0.0;
  for (const NegentropyTerm& t : terms) {
    require(t.weight > 0.0, ErrorCode::kParameter, "negentropy weights must be positive");
    const Vector gy = y.unaryExpr([&](double v) { return nonquadratic_eval(t.g, v); });
    const double d = sample_mean(gy) - gaussian_reference(t.g);
    total += t.weight * d * d;
  }
  return total;
}

}  // namespace ivakit
