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
#include <optional>
#include <string_view>
#include <utility>

#include "ivakit/model.hpp"
#include "ivakit/rng.hpp"

namespace ivakit {

enum class ScvFamily { kGaussian, kLaplace };
enum class CovarianceStyle { kRandomSpd, kAr1 };

std::string_view to_string(ScvFamily family);
ScvFamily scv_family_from_string(std::string_view name);
std::string_view to_string(CovarianceStyle style);
CovarianceStyle covariance_style_from_string(std::string_view name);

struct ScvSpec {
  int p = 3;
  int k = 3;
  int n = 10000;
  ScvFamily family = ScvFamily::kGaussian;
  CovarianceStyle covariance_style = CovarianceStyle::kAr1;
  /// ar1: SCV j uses coefficient phi * (1 - j / (2 (p - 1))), so SCV 0 has phi
  /// and the last SCV phi / 2.
  double ar1_phi = 0.8;
  double min_cross_correlation = 0.1;
  std::uint64_t seed = 0;

  void validate() const;
};

struct GeneratedSources {
  SourceEstimates sources;
  MatrixList covariances;  // population R_j, one K x K correlation matrix per SCV
};

/// Entries phi^|k - k'|.
Matrix ar1_correlation(int k, double phi);

/// Eigenvalues uniform on [0.2, 1.8] normalized to trace K, Haar eigenvectors,
/// then rescaled to unit diagonal.
Matrix random_correlation(CounterRng& rng, int k);

/// Coefficient of SCV j under the ar1 style.
double ar1_coefficient(const ScvSpec& spec, int j);

GeneratedSources gen_scv_sources(const ScvSpec& spec);

/// Standard-normal matrices resampled until cond_2 <= condition_cap; throws
/// kParameter after 100 consecutive rejections.
MixingSet gen_mixing(int p, int k, double condition_cap, std::uint64_t seed);

/// Dataset k = Omega^[k] S^[k].
DatasetCollection mix(const SourceEstimates& sources, const MixingSet& mixing);

struct IdentifiabilityResult {
  bool identifiable = true;
  std::optional<std::pair<int, int>> offending_pair;
};

/// Fully Gaussian (B4) check: a pair (l, j) is non-identifiable when some
/// diagonal sign matrix D gives max|R_l - D R_j D| <= tol.
IdentifiabilityResult check_identifiability_gaussian(const MatrixList& covariances, double tol);

}  // namespace ivakit
