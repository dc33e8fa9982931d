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

#include <exception>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "ivakit/cli/commands.hpp"
#include "ivakit/cli/worker_pool.hpp"
#include "ivakit/error.hpp"

namespace {

using ivakit::cli::Json;

int report_error(const std::string& code, const std::string& message) {
  Json rec;
  rec["error"] = {{"code", code}, {"message", message}};
  std::cerr << rec.dump() << std::endl;
  return 1;
}

}  // namespace

int main(int argc, char** argv) {
  namespace cli = ivakit::cli;
  CLI::App app{"ivakit: independent vector analysis experiments"};
  app.require_subcommand(1);

  std::string config_path, data_dir, est_dir, out_dir;
  std::optional<std::string> truth_dir;

  auto* simulate = app.add_subcommand("simulate", "generate ground-truth bundles");
  simulate->add_option("--config", config_path, "TOML or JSON experiment config")->required();
  simulate->add_option("--out", out_dir, "output directory (default: config output_dir)");

  auto* separate = app.add_subcommand("separate", "run the configured algorithm on a data bundle");
  separate->add_option("--config", config_path, "TOML or JSON experiment config")->required();
  separate->add_option("--data", data_dir, "bundle from simulate or a directory of dataset_NNN.csv")->required();
  separate->add_option("--out", out_dir, "output directory (default: config output_dir)");

  auto* evaluate = app.add_subcommand("evaluate", "score estimates against ground truth");
  evaluate->add_option("--est", est_dir, "estimates bundle from separate")->required();
  evaluate->add_option("--truth", truth_dir, "ground-truth bundle; omit for a blind report");
  evaluate->add_option("--out", out_dir, "directory for report.json (default: the estimates bundle)");

  cli::ImageDemoOptions demo;
  std::vector<std::string> images;
  std::string algo = "iva_g", variant = "newton", nonlinearity = "G2", mixing = "random";
  auto* image_demo = app.add_subcommand("image-demo", "separate mixtures of raster images");
  image_demo->add_option("--images", images, "two or more PNG/PPM/PGM files of equal size")->required();
  image_demo->add_option("--algo", algo, "natural_gradient, newton, fastiva, auxiva, iva_g, iva_gl or none");
  image_demo->add_option("--seed", demo.seed, "mixing and initialization seed");
  image_demo->add_option("--variant", variant, "iva_g variant: matrix_gradient, vector_gradient or newton");
  image_demo->add_option("--nonlinearity", nonlinearity, "fastiva nonlinearity: G1, G2, G3 or G4");
  image_demo->add_option("--mixing", mixing, "random or identity")->check(CLI::IsMember({"random", "identity"}));
  image_demo->add_option("--condition-cap", demo.condition_cap, "condition number cap of the random mixing");
  image_demo->add_flag("--grayscale", demo.grayscale, "convert inputs to one channel (K = 1)");
  image_demo->add_option("--out", out_dir, "output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    return report_error("usage", e.what());
  }

  try {
    cli::CommandOptions opt;
    opt.workers = cli::worker_count_from_env();
    opt.log = &std::cerr;
    Json summary;
    if (*simulate || *separate) {
      cli::ExperimentConfig cfg = cli::load_config(config_path);
      const std::filesystem::path out = out_dir.empty() ? cfg.output_dir : std::filesystem::path(out_dir);
      summary = *simulate ? cli::cmd_simulate(cfg, out, opt) : cli::cmd_separate(cfg, data_dir, out, opt);
    } else if (*evaluate) {
      std::optional<std::filesystem::path> truth;
      if (truth_dir) truth = *truth_dir;
      summary = cli::cmd_evaluate(est_dir, truth, out_dir.empty() ? est_dir : out_dir, opt);
    } else {
      demo.images.assign(images.begin(), images.end());
      demo.algorithm.name = cli::algorithm_from_string(algo);
      if (demo.algorithm.name == cli::Algorithm::kFastIva)
        demo.algorithm.nonlinearity = ivakit::nonlinearity_from_string(nonlinearity);
      if (demo.algorithm.name == cli::Algorithm::kIvaG)
        demo.algorithm.variant = ivakit::iva_g_variant_from_string(variant);
      demo.mixing = mixing == "identity" ? cli::DemoMixing::kIdentity : cli::DemoMixing::kRandom;
      if (!out_dir.empty()) demo.output_dir = out_dir;
      summary = cli::cmd_image_demo(demo, opt);
    }
    std::cout << summary.dump(2) << std::endl;
    return 0;
  } catch (const ivakit::Error& e) {
    return report_error(std::string(ivakit::to_string(e.code())), e.what());
  } catch (const std::exception& e) {
    return report_error("internal", e.what());
  }
}
