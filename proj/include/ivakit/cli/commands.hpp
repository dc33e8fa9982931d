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
#include <ostream>
#include <string>
#include <vector>

#include "ivakit/cli/config.hpp"

namespace ivakit::cli {

inline constexpr int kFormatVersion = 1;

/// Seed of the mixing matrices for a replicate whose source seed is `seed`.
std::uint64_t mixing_seed(std::uint64_t seed);

/// Ground truth of one replicate. Sources are stored per dataset (p x n).
struct TruthBundle {
  DatasetCollection mixtures;
  MatrixList sources;
  MixingSet mixing;
  MatrixList covariances;  // p matrices, K x K
};

void write_truth_bundle(const std::filesystem::path& dir, const TruthBundle& bundle);
TruthBundle read_truth_bundle(const std::filesystem::path& dir);

/// Loaded input of `separate` or `evaluate`: replicate directories in index order.
struct BundleIndex {
  std::string kind;  // "ground_truth", "data" or "estimates"
  Json manifest;
  std::vector<std::filesystem::path> replicate_dirs;
};

/// Reads manifest.json; a directory without one but holding dataset_*.csv
/// files is treated as a single-replicate data bundle.
BundleIndex read_bundle_index(const std::filesystem::path& dir);

struct CommandOptions {
  std::size_t workers = 1;
  std::ostream* log = nullptr;  // warnings and progress; may be null
};

/// Writes manifest.json and replicate_NNN/{mixtures,sources,mixing,covariances}.bin.
Json cmd_simulate(const ExperimentConfig& cfg, const std::filesystem::path& out, const CommandOptions& opt);

/// Writes manifest.json, report.json (blind), traces.csv, timing.json and
/// replicate_NNN/{unmixing.bin,convergence.json}.
Json cmd_separate(const ExperimentConfig& cfg, const std::filesystem::path& data,
                  const std::filesystem::path& out, const CommandOptions& opt);

/// Writes report.json into `out_dir`. Without a truth bundle the report is
/// blind (convergence only).
Json cmd_evaluate(const std::filesystem::path& estimates, const std::optional<std::filesystem::path>& truth,
                  const std::filesystem::path& out_dir, const CommandOptions& opt);

enum class DemoMixing { kRandom, kIdentity };

struct ImageDemoOptions {
  std::vector<std::filesystem::path> images;
  AlgorithmChoice algorithm{Algorithm::kIvaG, std::nullopt, IvaGVariant::kNewton};
  std::uint64_t seed = 0;
  double condition_cap = 20.0;
  DemoMixing mixing = DemoMixing::kRandom;
  bool grayscale = false;  // force K = 1
  std::filesystem::path output_dir = "ivakit-image-demo";
};

/// Writes mixed_NN.png, separated_NN.png and report.json.
Json cmd_image_demo(const ImageDemoOptions& options, const CommandOptions& opt);

/// Flips the sign of every SCV component so that its sample skewness is
/// nonnegative. Used when no originals are available for alignment.
void fix_signs_by_skewness(SourceEstimates& sources);

/// Type-7 (linear interpolation) sample quantile, q in [0, 1].
double quantile(std::vector<double> values, double q);

/// Serialized with a trailing newline; the byte layout is what determinism
/// checks compare.
void write_json(const std::filesystem::path& path, const Json& document);
Json read_json(const std::filesystem::path& path);

}  // namespace ivakit::cli
