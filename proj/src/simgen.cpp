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

#include "ivakit/simgen.hpp"

#include <cmath>
#include <random>
#include <string>

#include "ivakit/error.hpp"

namespace ivakit {

namespace {

constexpr std::uint64_t kCovarianceStream = 1;
constexpr std::uint64_t kSampleStream = 2;
constexpr int kMaxCovarianceAttempts = 10;
constexpr int kMaxMixingRejections = 100;

double max_off_diagonal(const Matrix& r) {
  double m = 0.0;
  for (Eigen::Index a = 0; a < r.rows(); ++a)
    for (Eigen::Index b = 0; b < r.cols(); ++b)
      if (a != b) m = std::max(m, std::abs(r(a, b)));
  return m;
}

}  // namespace

std::string_view to_string(ScvFamily family) {
  return family == ScvFamily::kGaussian ? "gaussian" : "laplace";
}

ScvFamily scv_family_from_string(std::string_view name) {
  if (name == "gaussian") return ScvFamily::kGaussian;
  if (name == "laplace") return ScvFamily::kLaplace;
  fail(ErrorCode::kConfig, "unknown SCV family '" + std::string(name) + "'");
}

std::string_view to_string(CovarianceStyle style) {
  return style == CovarianceStyle::kAr1 ? "ar1" : "random_spd";
}

CovarianceStyle covariance_style_from_string(std::string_view name) {
  if (name == "ar1") return CovarianceStyle::kAr1;
  if (name == "random_spd") return CovarianceStyle::kRandomSpd;
  fail(ErrorCode::kConfig, "unknown covariance style '" + std::string(name) + "'");
}

void ScvSpec::validate() const {
  require(p >= 1 && k >= 1, ErrorCode::kParameter, "p and K must be positive");
  require(n > p, ErrorCode::kParameter, "n must exceed p");
  require(min_cross_correlation > 0.0 && min_cross_correlation < 1.0, ErrorCode::kParameter,
          "min_cross_correlation must lie in (0, 1)");
  if (covariance_style == CovarianceStyle::kAr1)
    require(ar1_phi > 0.0 && ar1_phi < 1.0, ErrorCode::kParameter, "ar1 coefficient must lie in (0, 1)");
}

Matrix ar1_correlation(int k, double phi) {
  Matrix r(k, k);
  for (int a = 0; a < k; ++a)
    for (int b = 0; b < k; ++b) r(a, b) = std::pow(phi, std::abs(a - b));
  return r;
}

Matrix random_correlation(CounterRng& rng, int k) {
  std::uniform_real_distribution<double> unif(0.2, 1.8);
  Vector lambda(k);
  for (int i = 0; i < k; ++i) lambda(i) = unif(rng);
  lambda *= static_cast<double>(k) / lambda.sum();
  const Matrix q = random_orthogonal(rng, k);
  const Matrix c = q * lambda.asDiagonal() * q.transpose();
  const Vector d = c.diagonal().array().rsqrt();
  Matrix r = d.asDiagonal() * c * d.asDiagonal();
  r = (0.5 * (r + r.transpose())).eval();
  r.diagonal().setOnes();
  return r;
}

double ar1_coefficient(const ScvSpec& spec, int j) {
  if (spec.p == 1) return spec.ar1_phi;
  return spec.ar1_phi * (1.0 - static_cast<double>(j) / (2.0 * (spec.p - 1)));
}

GeneratedSources gen_scv_sources(const ScvSpec& spec) {
  spec.validate();
  const CounterRng root(spec.seed);
  GeneratedSources out;
  out.sources.scvs.reserve(spec.p);
  out.covariances.reserve(spec.p);
  for (int j = 0; j < spec.p; ++j) {
    CounterRng cov_rng = root.split(kCovarianceStream).split(static_cast<std::uint64_t>(j));
    Matrix r;
    Eigen::LLT<Matrix> llt;
    bool ok = false;
    for (int attempt = 0; attempt < kMaxCovarianceAttempts && !ok; ++attempt) {
      r = spec.covariance_style == CovarianceStyle::kAr1 ? ar1_correlation(spec.k, ar1_coefficient(spec, j))
                                                         : random_correlation(cov_rng, spec.k);
      llt.compute(r);
      ok = llt.info() == Eigen::Success && (spec.k == 1 || max_off_diagonal(r) >= spec.min_cross_correlation);
      if (spec.covariance_style == CovarianceStyle::kAr1) break;
    }
    if (!ok)
      fail(ErrorCode::kParameter, "could not build a valid SCV covariance for SCV " + std::to_string(j) +
                                      " with cross-correlation >= " + std::to_string(spec.min_cross_correlation));

    CounterRng rng = root.split(kSampleStream).split(static_cast<std::uint64_t>(j));
    Matrix z = llt.matrixL() * standard_normal_matrix(rng, spec.k, spec.n);
    if (spec.family == ScvFamily::kLaplace) {
      std::exponential_distribution<double> expo(1.0);
      for (int i = 0; i < spec.n; ++i) z.col(i) *= std::sqrt(expo(rng));
      for (int a = 0; a < spec.k; ++a) {
        const double mean = z.row(a).mean();
        const double sd = std::sqrt((z.row(a).array() - mean).square().mean());
        z.row(a) /= sd;
      }
    }
    out.sources.scvs.push_back(std::move(z));
    out.covariances.push_back(std::move(r));
  }
  return out;
}

MixingSet gen_mixing(int p, int k, double condition_cap, std::uint64_t seed) {
  require(p >= 1 && k >= 1, ErrorCode::kParameter, "p and K must be positive");
  require(condition_cap > 1.0, ErrorCode::kParameter, "condition cap must exceed 1");
  const CounterRng root(seed);
  MixingSet out;
  for (int kk = 0; kk < k; ++kk) {
    CounterRng rng = root.split(static_cast<std::uint64_t>(kk));
    int rejections = 0;
    while (true) {
      Matrix m = standard_normal_matrix(rng, p, p);
      const Eigen::JacobiSVD<Matrix> svd(m);
      const Vector& sv = svd.singularValues();
      if (sv(p - 1) > 0.0 && sv(0) / sv(p - 1) <= condition_cap) {
        out.matrices.push_back(std::move(m));
        break;
      }
      if (++rejections >= kMaxMixingRejections)
        fail(ErrorCode::kParameter, "condition cap " + std::to_string(condition_cap) + " rejected " +
                                        std::to_string(kMaxMixingRejections) + " consecutive draws");
    }
  }
  return out;
}

DatasetCollection mix(const SourceEstimates& sources, const MixingSet& mixing) {
  const MatrixList per_dataset = sources.to_datasets();
  require(per_dataset.size() == mixing.matrices.size(), ErrorCode::kShape,
          "mixing set has " + std::to_string(mixing.matrices.size()) + " matrices for K=" +
              std::to_string(per_dataset.size()));
  MatrixList data;
  for (std::size_t k = 0; k < per_dataset.size(); ++k) {
    const Matrix& a = mixing.matrices[k];
    require(a.rows() == per_dataset[k].rows() && a.cols() == per_dataset[k].rows(), ErrorCode::kShape,
            "mixing matrix " + std::to_string(k) + " does not match p");
    data.push_back(a * per_dataset[k]);
  }
  return DatasetCollection(std::move(data));
}

IdentifiabilityResult check_identifiability_gaussian(const MatrixList& covariances, double tol) {
  require(!covariances.empty(), ErrorCode::kShape, "no covariances given");
  const Eigen::Index k = covariances.front().rows();
  if (k > 20) fail(ErrorCode::kCombinatorialLimit, "sign enumeration is limited to K <= 20");
  for (std::size_t j = 0; j < covariances.size(); ++j) {
    const Matrix& r = covariances[j];
    require(r.rows() == k && r.cols() == k, ErrorCode::kShape, "covariances must share one K x K shape");
    require(r.allFinite() && (r - r.transpose()).cwiseAbs().maxCoeff() <= 1e-12, ErrorCode::kParameter,
            "covariance " + std::to_string(j) + " is not a finite symmetric matrix");
  }
  const std::uint64_t patterns = std::uint64_t{1} << (k - 1);
  Vector d(k);
  for (std::size_t l = 0; l < covariances.size(); ++l) {
    for (std::size_t j = l + 1; j < covariances.size(); ++j) {
      for (std::uint64_t mask = 0; mask < patterns; ++mask) {
        d(0) = 1.0;
        for (Eigen::Index a = 1; a < k; ++a) d(a) = ((mask >> (a - 1)) & 1U) ? -1.0 : 1.0;
        const Matrix flipped = d.asDiagonal() * covariances[j] * d.asDiagonal();
        if ((covariances[l] - flipped).cwiseAbs().maxCoeff() <= tol)
          return {false, std::make_pair(static_cast<int>(l), static_cast<int>(j))};
      }
    }
  }
  return {true, std::nullopt};
}

}  // namespace ivakit
