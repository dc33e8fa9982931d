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

#include "ivakit/cli/commands.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "ivakit/cli/image_io.hpp"
#include "ivakit/cli/worker_pool.hpp"
#include "ivakit/dataset_io.hpp"
#include "ivakit/error.hpp"
#include "ivakit/rng.hpp"
#include "json_fields.hpp"

namespace ivakit::cli {

namespace fs = std::filesystem;

namespace {

constexpr const char* kSeedRule =
    "replicate r uses derive_seed(master_seed, r) = mix64(master_seed ^ mix64(r + 1)); "
    "its mixing matrices use derive_seed(replicate_seed, 0x6d6978)";

std::string replicate_dir_name(std::size_t r) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "replicate_%03zu", r);
  return buf;
}

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  require(!ec && fs::is_directory(dir), ErrorCode::kIo, "cannot create directory " + dir.string() + ": " + ec.message());
}

std::string format_double(double v) {
  if (!std::isfinite(v)) return std::isnan(v) ? "nan" : (v > 0 ? "inf" : "-inf");
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

Json number_or_null(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

Json summary_stats(std::vector<double> values) {
  if (values.empty()) return nullptr;
  Json j;
  j["median"] = quantile(values, 0.5);
  j["q10"] = quantile(values, 0.1);
  j["q90"] = quantile(values, 0.9);
  j["min"] = *std::min_element(values.begin(), values.end());
  j["max"] = *std::max_element(values.begin(), values.end());
  return j;
}

const Json& manifest_field(const Json& m, const char* key, const fs::path& dir) {
  const Json* v = fields::find(m, key);
  require(v != nullptr, ErrorCode::kDataValidation, "manifest in " + dir.string() + " lacks '" + key + "'");
  return *v;
}

DatasetCollection load_mixtures(const BundleIndex& index, std::size_t r) {
  const fs::path& dir = index.replicate_dirs.at(r);
  if (index.kind == "data" && !fs::exists(dir / "mixtures.bin")) return DatasetCollection(io::read_csv_directory(dir));
  return DatasetCollection(io::read_container(dir / "mixtures.bin"));
}

struct ReplicateResult {
  Separation separation;
  double wall_time = 0.0;
  std::size_t data_replicate = 0;
};

}  // namespace

std::uint64_t mixing_seed(std::uint64_t seed) { return derive_seed(seed, 0x6d6978); }

double quantile(std::vector<double> values, double q) {
  require(!values.empty(), ErrorCode::kParameter, "quantile of an empty sample");
  require(q >= 0.0 && q <= 1.0, ErrorCode::kParameter, "quantile level must lie in [0, 1]");
  std::sort(values.begin(), values.end());
  const double h = q * static_cast<double>(values.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const std::size_t hi = std::min(lo + 1, values.size() - 1);
  return values[lo] + (h - static_cast<double>(lo)) * (values[hi] - values[lo]);
}

void write_json(const fs::path& path, const Json& document) {
  std::ofstream out(path, std::ios::binary);
  require(out.good(), ErrorCode::kIo, "cannot write " + path.string());
  out << document.dump(2) << "\n";
  require(out.good(), ErrorCode::kIo, "failed writing " + path.string());
}

Json read_json(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  require(in.good(), ErrorCode::kIo, "cannot open " + path.string());
  try {
    return Json::parse(in);
  } catch (const Json::parse_error& e) {
    fail(ErrorCode::kDataValidation, "malformed JSON in " + path.string() + ": " + e.what());
  }
}

void write_truth_bundle(const fs::path& dir, const TruthBundle& b) {
  ensure_dir(dir);
  io::write_container(dir / "mixtures.bin", b.mixtures.datasets());
  io::write_container(dir / "sources.bin", b.sources);
  io::write_container(dir / "mixing.bin", b.mixing.matrices);
  io::write_container(dir / "covariances.bin", b.covariances);
}

TruthBundle read_truth_bundle(const fs::path& dir) {
  TruthBundle b{DatasetCollection(io::read_container(dir / "mixtures.bin")), io::read_container(dir / "sources.bin"),
                MixingSet{io::read_container(dir / "mixing.bin")}, io::read_container(dir / "covariances.bin")};
  const std::size_t k = b.mixtures.k_count();
  const Eigen::Index p = b.mixtures.channel_count();
  require(b.sources.size() == k && b.mixing.matrices.size() == k, ErrorCode::kShape,
          "ground truth in " + dir.string() + " has inconsistent dataset counts");
  require(b.sources.front().rows() == p && b.sources.front().cols() == b.mixtures.sample_count() &&
              b.mixing.matrices.front().rows() == p && b.mixing.matrices.front().cols() == p,
          ErrorCode::kShape, "ground truth in " + dir.string() + " has inconsistent shapes");
  return b;
}

BundleIndex read_bundle_index(const fs::path& dir) {
  require(fs::is_directory(dir), ErrorCode::kIo, "not a directory: " + dir.string());
  BundleIndex index;
  const fs::path manifest = dir / "manifest.json";
  if (!fs::exists(manifest)) {
    require(fs::exists(dir / "dataset_000.csv"), ErrorCode::kIo,
            dir.string() + " has neither manifest.json nor dataset_000.csv");
    index.kind = "data";
    index.replicate_dirs.push_back(dir);
    return index;
  }
  index.manifest = read_json(manifest);
  index.kind = fields::string(manifest_field(index.manifest, "kind", dir), "manifest.kind");
  require(index.kind == "ground_truth" || index.kind == "estimates" || index.kind == "data",
          ErrorCode::kDataValidation, "unknown bundle kind '" + index.kind + "' in " + dir.string());
  const Json& reps = manifest_field(index.manifest, "replicates", dir);
  require(reps.is_array() && !reps.empty(), ErrorCode::kDataValidation, "manifest lists no replicates in " + dir.string());
  for (std::size_t r = 0; r < reps.size(); ++r) {
    const Json& rep = reps[r];
    require(fields::small_int(manifest_field(rep, "index", dir), "index") == static_cast<int>(r),
            ErrorCode::kDataValidation, "replicates out of order in " + manifest.string());
    const std::string sub = fields::string(manifest_field(rep, "directory", dir), "directory");
    require(fs::path(sub).is_relative() && sub.find("..") == std::string::npos, ErrorCode::kDataValidation,
            "replicate directory must be a plain relative name in " + manifest.string());
    index.replicate_dirs.push_back(dir / sub);
  }
  return index;
}

Json cmd_simulate(const ExperimentConfig& cfg, const fs::path& out, const CommandOptions& opt) {
  require(cfg.problem.has_value(), ErrorCode::kConfig, "simulate needs a [problem] section");
  ensure_dir(out);
  const auto count = static_cast<std::size_t>(cfg.replicates);
  std::vector<std::uint64_t> seeds(count);
  for (std::size_t r = 0; r < count; ++r) seeds[r] = derive_seed(cfg.seed, r);

  parallel_for(count, opt.workers, [&](std::size_t r) {
    ScvSpec spec = *cfg.problem;
    spec.seed = seeds[r];
    const GeneratedSources g = gen_scv_sources(spec);
    MixingSet mixing = gen_mixing(spec.p, spec.k, cfg.condition_cap, mixing_seed(spec.seed));
    DatasetCollection mixtures = mix(g.sources, mixing);
    write_truth_bundle(out / replicate_dir_name(r),
                       TruthBundle{std::move(mixtures), g.sources.to_datasets(), std::move(mixing), g.covariances});
  });

  Json m;
  m["format"] = "ivakit-bundle";
  m["version"] = kFormatVersion;
  m["kind"] = "ground_truth";
  m["master_seed"] = cfg.seed;
  m["seed_rule"] = kSeedRule;
  Json problem = spec_to_json(*cfg.problem);
  problem.erase("seed");
  problem["condition_cap"] = cfg.condition_cap;
  m["problem"] = std::move(problem);
  m["files"] = {{"mixtures", "mixtures.bin"}, {"sources", "sources.bin"}, {"mixing", "mixing.bin"},
                {"covariances", "covariances.bin"}};
  Json reps = Json::array();
  for (std::size_t r = 0; r < count; ++r)
    reps.push_back({{"index", r}, {"seed", seeds[r]}, {"mixing_seed", mixing_seed(seeds[r])},
                    {"directory", replicate_dir_name(r)}});
  m["replicates"] = std::move(reps);
  write_json(out / "manifest.json", m);

  Json summary;
  summary["command"] = "simulate";
  summary["replicates"] = count;
  summary["output_dir"] = out.string();
  return summary;
}

Json cmd_separate(const ExperimentConfig& cfg, const fs::path& data, const fs::path& out, const CommandOptions& opt) {
  const BundleIndex index = read_bundle_index(data);
  require(index.kind == "ground_truth" || index.kind == "data", ErrorCode::kDataValidation,
          data.string() + " holds " + index.kind + ", not input data");
  const std::size_t available = index.replicate_dirs.size();
  const auto runs = static_cast<std::size_t>(cfg.replicates);
  require(available == 1 || available == runs, ErrorCode::kConfig,
          "config asks for " + std::to_string(runs) + " replicates but " + data.string() + " holds " +
              std::to_string(available) + " (use 1 or match the count)");

  std::optional<DatasetCollection> shared;
  if (available == 1) shared = load_mixtures(index, 0);
  // Validates dimensions and density descriptors before any optimizer runs.
  {
    const DatasetCollection probe = shared ? *shared : load_mixtures(index, 0);
    if (!cfg.density.empty())
      cfg.density.build(static_cast<int>(probe.channel_count()), static_cast<int>(probe.k_count()));
  }
  ensure_dir(out);

  std::vector<ReplicateResult> results(runs);
  const auto t0 = std::chrono::steady_clock::now();
  parallel_for(runs, opt.workers, [&](std::size_t r) {
    const auto start = std::chrono::steady_clock::now();
    ReplicateResult& res = results[r];
    res.data_replicate = available == 1 ? 0 : r;
    const DatasetCollection mixtures = shared ? *shared : load_mixtures(index, r);
    const int p = static_cast<int>(mixtures.channel_count());
    const int k = static_cast<int>(mixtures.k_count());
    const std::vector<DensityModel> models =
        cfg.density.empty() ? default_models(cfg.algorithm, p, k) : cfg.density.build(p, k);
    OptimizerConfig oc = cfg.optimizer;
    oc.seed = derive_seed(cfg.seed, r);
    res.separation = separate_collection(cfg.algorithm, models, mixtures, oc);
    const fs::path dir = out / replicate_dir_name(r);
    ensure_dir(dir);
    io::write_container(dir / "unmixing.bin", res.separation.unmixing.matrices);
    write_json(dir / "convergence.json", report_to_json(res.separation.report));
    res.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  });
  const double total = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  std::ostringstream csv;
  csv << "replicate,stage,iteration,cost,criterion\n";
  for (std::size_t r = 0; r < runs; ++r) {
    const ConvergenceReport& rep = results[r].separation.report;
    for (std::size_t i = 0; i < rep.cost_trace.size(); ++i) {
      csv << r << ',' << (i < rep.stage_trace.size() ? rep.stage_trace[i] : 1) << ',' << i << ','
          << format_double(rep.cost_trace[i]) << ',';
      if (i > 0 && i - 1 < rep.criterion_trace.size()) csv << format_double(rep.criterion_trace[i - 1]);
      csv << '\n';
    }
  }
  {
    std::ofstream f(out / "traces.csv", std::ios::binary);
    f << csv.str();
    require(f.good(), ErrorCode::kIo, "failed writing " + (out / "traces.csv").string());
  }

  Json timing;
  timing["total_wall_time_seconds"] = total;
  timing["workers"] = opt.workers;
  Json tr = Json::array();
  for (std::size_t r = 0; r < runs; ++r)
    tr.push_back({{"index", r},
                  {"wall_time_seconds", results[r].wall_time},
                  {"optimizer_wall_time_seconds", results[r].separation.report.wall_time_seconds}});
  timing["replicates"] = std::move(tr);
  write_json(out / "timing.json", timing);

  Json m;
  m["format"] = "ivakit-bundle";
  m["version"] = kFormatVersion;
  m["kind"] = "estimates";
  m["master_seed"] = cfg.seed;
  m["seed_rule"] = kSeedRule;
  m["config"] = cfg.to_json();
  {
    const DatasetCollection probe = shared ? *shared : load_mixtures(index, 0);
    m["data"] = {{"kind", index.kind},
                 {"replicates", available},
                 {"p", probe.channel_count()},
                 {"k", probe.k_count()},
                 {"n", probe.sample_count()}};
  }
  m["files"] = {{"unmixing", "unmixing.bin"}, {"convergence", "convergence.json"}};
  Json reps = Json::array();
  std::size_t failed = 0;
  for (std::size_t r = 0; r < runs; ++r) {
    const Separation& s = results[r].separation;
    Json rep = {{"index", r},
                {"seed", derive_seed(cfg.seed, r)},
                {"data_replicate", results[r].data_replicate},
                {"directory", replicate_dir_name(r)},
                {"status", s.error ? "failed" : "ok"}};
    if (s.error) {
      rep["error_code"] = std::string(to_string(*s.error));
      ++failed;
      if (opt.log) *opt.log << "warning: replicate " << r << " failed: " << s.report.failure << "\n";
    }
    reps.push_back(std::move(rep));
  }
  m["replicates"] = std::move(reps);
  write_json(out / "manifest.json", m);

  Json summary = cmd_evaluate(out, std::nullopt, out, opt);
  summary["command"] = "separate";
  summary["failed_replicates"] = failed;
  return summary;
}

Json cmd_evaluate(const fs::path& estimates, const std::optional<fs::path>& truth, const fs::path& out_dir,
                  const CommandOptions& opt) {
  const BundleIndex est = read_bundle_index(estimates);
  require(est.kind == "estimates", ErrorCode::kDataValidation, estimates.string() + " is not an estimates bundle");
  std::optional<BundleIndex> gt;
  Json warnings = Json::array();
  if (truth) {
    BundleIndex t = read_bundle_index(*truth);
    if (t.kind == "ground_truth") {
      gt = std::move(t);
    } else {
      warnings.push_back(truth->string() + " has no ground truth (" + t.kind + "); evaluating in blind mode");
    }
  }

  const Json& reps = est.manifest["replicates"];
  Json records = Json::array();
  std::vector<double> jisi_values, iterations, final_costs;
  std::size_t converged = 0, failed = 0;
  for (std::size_t r = 0; r < est.replicate_dirs.size(); ++r) {
    const Json& rep = reps[r];
    const fs::path& dir = est.replicate_dirs[r];
    const ConvergenceReport conv = report_from_json(read_json(dir / "convergence.json"));
    const bool ok = fields::string(manifest_field(rep, "status", estimates), "status") == "ok";
    Json rec;
    rec["index"] = r;
    rec["seed"] = fields::seed(manifest_field(rep, "seed", estimates), "seed");
    rec["data_replicate"] = manifest_field(rep, "data_replicate", estimates);
    rec["status"] = ok ? "ok" : "failed";
    if (!ok) {
      ++failed;
      rec["failure"] = conv.failure;
    }
    if (conv.converged) ++converged;
    if (ok) {
      iterations.push_back(conv.iterations_run);
      if (std::isfinite(conv.final_cost)) final_costs.push_back(conv.final_cost);
    }

    if (gt) {
      const auto d = static_cast<std::size_t>(fields::small_int(rec["data_replicate"], "data_replicate"));
      require(d < gt->replicate_dirs.size(), ErrorCode::kShape,
              "estimate replicate " + std::to_string(r) + " refers to data replicate " + std::to_string(d) +
                  " but the truth bundle holds " + std::to_string(gt->replicate_dirs.size()));
      const TruthBundle tb = read_truth_bundle(gt->replicate_dirs[d]);
      UnmixingSet w{io::read_container(dir / "unmixing.bin"), true};
      require(w.k_count() == tb.mixtures.k_count() && w.channel_count() == tb.mixtures.channel_count(),
              ErrorCode::kShape,
              "estimate replicate " + std::to_string(r) + " has K = " + std::to_string(w.k_count()) + ", p = " +
                  std::to_string(w.channel_count()) + " but the truth has K = " +
                  std::to_string(tb.mixtures.k_count()) + ", p = " + std::to_string(tb.mixtures.channel_count()));
      const MatrixList gains = gain_matrices(w, tb.mixing);
      Json isis = Json::array();
      for (const Matrix& g : gains) {
        try {
          isis.push_back(isi(g));
        } catch (const Error&) {
          isis.push_back(nullptr);
        }
      }
      try {
        const double j = joint_isi(gains);
        rec["jisi"] = j;
        if (ok) jisi_values.push_back(j);
        if (j > 0.5)
          warnings.push_back("replicate " + std::to_string(r) + ": jISI " + format_double(j) +
                             " exceeds 0.5 (failed separation or mismatched pairing)");
      } catch (const Error& e) {
        rec["jisi"] = nullptr;
        warnings.push_back("replicate " + std::to_string(r) + ": jISI undefined (" + e.what() + ")");
      }
      rec["isi"] = std::move(isis);
      const auto [centered, means] = center(tb.mixtures);
      MatrixList truth_centered = tb.sources;
      for (Matrix& s : truth_centered) s = (s.colwise() - s.rowwise().mean()).eval();
      const AlignmentResult al =
          align_to_truth(apply_unmixing(w, centered), SourceEstimates::from_datasets(truth_centered));
      rec["alignment"] = alignment_to_json(al.alignment);
    }
    rec["convergence"] = report_to_json(conv);
    records.push_back(std::move(rec));
  }

  Json report;
  report["format"] = "ivakit-report";
  report["version"] = kFormatVersion;
  report["mode"] = gt ? "evaluated" : "blind";
  report["algorithm"] = est.manifest["config"]["algorithm"];
  report["master_seed"] = est.manifest["master_seed"];
  Json agg;
  agg["replicates"] = records.size();
  agg["converged"] = converged;
  agg["failed"] = failed;
  if (gt) agg["jisi"] = summary_stats(jisi_values);
  agg["iterations"] = summary_stats(iterations);
  agg["final_cost"] = summary_stats(final_costs);
  report["aggregate"] = std::move(agg);
  report["warnings"] = warnings;
  report["replicates"] = std::move(records);
  ensure_dir(out_dir);
  write_json(out_dir / "report.json", report);

  if (opt.log)
    for (const Json& w : warnings) *opt.log << "warning: " << w.get<std::string>() << "\n";

  Json summary;
  summary["command"] = "evaluate";
  summary["mode"] = report["mode"];
  summary["aggregate"] = report["aggregate"];
  summary["warnings"] = warnings.size();
  summary["report"] = (out_dir / "report.json").string();
  return summary;
}

void fix_signs_by_skewness(SourceEstimates& sources) {
  for (Matrix& scv : sources.scvs)
    for (Eigen::Index k = 0; k < scv.rows(); ++k) {
      const Eigen::ArrayXd c = scv.row(k).array() - scv.row(k).mean();
      if ((c.cube()).mean() < 0.0) scv.row(k) *= -1.0;
    }
}

Json cmd_image_demo(const ImageDemoOptions& o, const CommandOptions& opt) {
  require(o.images.size() >= 2, ErrorCode::kConfig, "image-demo needs at least two images");
  std::vector<Image> images;
  for (const fs::path& path : o.images) images.push_back(read_image(path));
  const Image& first = images.front();
  for (std::size_t j = 1; j < images.size(); ++j)
    require(images[j].width == first.width && images[j].height == first.height, ErrorCode::kDataValidation,
            "image " + o.images[j].string() + " is " + std::to_string(images[j].width) + "x" +
                std::to_string(images[j].height) + " but " + o.images[0].string() + " is " +
                std::to_string(first.width) + "x" + std::to_string(first.height));
  const bool any_gray = std::any_of(images.begin(), images.end(), [](const Image& i) { return i.channels == 1; });
  const int k = (o.grayscale || any_gray) ? 1 : 3;
  if (k == 1 && !o.grayscale && opt.log)
    *opt.log << "warning: some inputs are grayscale; converting every image to one channel\n";
  if (k == 1) {
    for (Image& img : images) {
      if (img.channels == 1) continue;
      Image gray{img.width, img.height, 1, {}};
      gray.pixels.resize(static_cast<std::size_t>(img.width) * img.height);
      for (std::size_t i = 0; i < gray.pixels.size(); ++i)
        gray.pixels[i] = 0.299 * img.pixels[3 * i] + 0.587 * img.pixels[3 * i + 1] + 0.114 * img.pixels[3 * i + 2];
      img = std::move(gray);
    }
  }

  const int p = static_cast<int>(images.size());
  const Eigen::Index n = static_cast<Eigen::Index>(first.width) * first.height;
  require(n > p, ErrorCode::kDataValidation, "images have too few pixels for " + std::to_string(p) + " sources");
  MatrixList per_dataset(static_cast<std::size_t>(k), Matrix(p, n));
  for (int j = 0; j < p; ++j)
    for (int c = 0; c < k; ++c) per_dataset[static_cast<std::size_t>(c)].row(j) = channel_row(images[j], c);
  const SourceEstimates truth = SourceEstimates::from_datasets(per_dataset);

  MixingSet mixing;
  if (o.mixing == DemoMixing::kIdentity)
    mixing.matrices.assign(static_cast<std::size_t>(k), Matrix::Identity(p, p));
  else
    mixing = gen_mixing(p, k, o.condition_cap, mixing_seed(o.seed));
  const DatasetCollection mixtures = mix(truth, mixing);

  OptimizerConfig cfg =
      o.algorithm.name == Algorithm::kNaturalGradient ? OptimizerConfig::gradient_defaults() : OptimizerConfig{};
  if (o.algorithm.name == Algorithm::kIvaG && o.algorithm.variant != IvaGVariant::kNewton)
    cfg.step_size = OptimizerConfig::gradient_defaults().step_size;
  cfg.seed = o.seed;
  const Separation sep = separate_collection(o.algorithm, default_models(o.algorithm, p, k), mixtures, cfg);
  if (sep.error && opt.log) *opt.log << "warning: optimizer stopped early: " << sep.report.failure << "\n";

  const auto [centered, means] = center(mixtures);
  MatrixList truth_centered = per_dataset;
  for (Matrix& s : truth_centered) s = (s.colwise() - s.rowwise().mean()).eval();
  const AlignmentResult al =
      align_to_truth(apply_unmixing(sep.unmixing, centered), SourceEstimates::from_datasets(truth_centered));

  ensure_dir(o.output_dir);
  Json outputs = Json::array();
  for (int j = 0; j < p; ++j) {
    char name[64];
    Image mixed{first.width, first.height, k, {}}, separated{first.width, first.height, k, {}};
    for (int c = 0; c < k; ++c) {
      set_channel(mixed, c, min_max_scale(mixtures.dataset(static_cast<std::size_t>(c)).row(j)));
      set_channel(separated, c, min_max_scale(al.aligned.scvs[j].row(c)));
    }
    std::snprintf(name, sizeof name, "mixed_%02d.png", j);
    write_image(o.output_dir / name, mixed);
    const std::string mixed_name = name;
    std::snprintf(name, sizeof name, "separated_%02d.png", j);
    write_image(o.output_dir / name, separated);
    outputs.push_back({{"source", o.images[j].filename().string()}, {"mixed", mixed_name}, {"separated", name}});
  }

  const MatrixList gains = gain_matrices(sep.unmixing, mixing);
  Json report;
  report["format"] = "ivakit-image-demo";
  report["version"] = kFormatVersion;
  report["width"] = first.width;
  report["height"] = first.height;
  report["p"] = p;
  report["k"] = k;
  report["n"] = n;
  report["seed"] = o.seed;
  report["mixing"] = o.mixing == DemoMixing::kIdentity ? "identity" : "random";
  if (o.mixing == DemoMixing::kRandom) {
    report["mixing_seed"] = mixing_seed(o.seed);
    report["condition_cap"] = o.condition_cap;
  }
  report["algorithm"] = o.algorithm.to_json();
  report["jisi"] = number_or_null([&] {
    try {
      return joint_isi(gains);
    } catch (const Error&) {
      return std::nan("");
    }
  }());
  Json isis = Json::array();
  for (const Matrix& g : gains) {
    try {
      isis.push_back(isi(g));
    } catch (const Error&) {
      isis.push_back(nullptr);
    }
  }
  report["isi"] = std::move(isis);
  report["alignment"] = alignment_to_json(al.alignment);
  report["convergence"] = report_to_json(sep.report);
  report["status"] = sep.error ? "failed" : "ok";
  report["images"] = std::move(outputs);
  write_json(o.output_dir / "report.json", report);

  Json summary;
  summary["command"] = "image-demo";
  summary["jisi"] = report["jisi"];
  summary["output_dir"] = o.output_dir.string();
  return summary;
}

}  // namespace ivakit::cli
