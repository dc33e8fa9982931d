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
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "ivakit/cli/serialization.hpp"

namespace ivakit::cli {

enum class Algorithm { kNaturalGradient, kNewton, kFastIva, kAuxIva, kIvaG, kIvaGl, kNone };

std::string_view to_string(Algorithm algorithm);
Algorithm algorithm_from_string(std::string_view name);

struct AlgorithmChoice {
  Algorithm name = Algorithm::kNewton;
  std::optional<NonlinearityChoice> nonlinearity;  // fastiva only
  IvaGVariant variant = IvaGVariant::kNewton;      // iva_g only

  Json to_json() const;
};

/// Either one descriptor shared by every SCV or one per SCV.
struct DensitySpec {
  std::optional<Json> shared;
  std::vector<Json> per_scv;

  bool empty() const { return !shared && per_scv.empty(); }
  /// p models of dimension K; throws kConfig on a count or dimension mismatch.
  std::vector<DensityModel> build(int p, int k) const;
  Json to_json() const;
};

struct ExperimentConfig {
  std::optional<ScvSpec> problem;  // seed is replaced per replicate
  double condition_cap = 20.0;
  AlgorithmChoice algorithm;
  DensitySpec density;
  OptimizerConfig optimizer;
  int replicates = 1;
  std::uint64_t seed = 0;
  std::filesystem::path output_dir = "ivakit-out";

  /// Algorithm/density compatibility: fastiva needs a nonlinearity, auxiva a
  /// super_gaussian density, natural_gradient and newton a density, iva_g and
  /// iva_gl at most a Gaussian one.
  void validate() const;

  Json to_json() const;
};

/// Parses TOML text; every failure is a kConfig error naming the offending key.
ExperimentConfig parse_config_toml(std::string_view text);
ExperimentConfig parse_config_json(const Json& document);

/// .json files are read as JSON, anything else as TOML.
ExperimentConfig load_config(const std::filesystem::path& path);

/// Models an algorithm uses when the config leaves the density unset.
std::vector<DensityModel> default_models(const AlgorithmChoice& algorithm, int p, int k);

struct Separation {
  UnmixingSet unmixing;  // composed with whitening; acts on centered raw data
  ConvergenceReport report;
  std::optional<ErrorCode> error;  // set when the optimizer aborted; unmixing is the last iterate
};

/// Centers and whitens `raw`, runs the algorithm and composes the whitener
/// back in. Optimizer aborts are returned, not thrown. kNone returns the
/// identity without iterating.
Separation separate_collection(const AlgorithmChoice& algorithm, const std::vector<DensityModel>& models,
                               const DatasetCollection& raw, const OptimizerConfig& cfg);

}  // namespace ivakit::cli
