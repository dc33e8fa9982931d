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

#include "ivakit/cli/config.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#define TOML_EXCEPTIONS 1
#include "toml.hpp"

#include "ivakit/error.hpp"
#include "json_fields.hpp"

namespace ivakit::cli {

std::string_view to_string(Algorithm algorithm) {
  switch (algorithm) {
    case Algorithm::kNaturalGradient: return "natural_gradient";
    case Algorithm::kNewton: return "newton";
    case Algorithm::kFastIva: return "fastiva";
    case Algorithm::kAuxIva: return "auxiva";
    case Algorithm::kIvaG: return "iva_g";
    case Algorithm::kIvaGl: return "iva_gl";
    case Algorithm::kNone: return "none";
  }
  return "unknown";
}

Algorithm algorithm_from_string(std::string_view name) {
  for (Algorithm a : {Algorithm::kNaturalGradient, Algorithm::kNewton, Algorithm::kFastIva, Algorithm::kAuxIva,
                      Algorithm::kIvaG, Algorithm::kIvaGl, Algorithm::kNone})
    if (to_string(a) == name) return a;
  fail(ErrorCode::kConfig, "unknown algorithm '" + std::string(name) +
                               "' (expected natural_gradient, newton, fastiva, auxiva, iva_g, iva_gl or none)");
}

Json AlgorithmChoice::to_json() const {
  Json j;
  j["name"] = std::string(to_string(name));
  if (name == Algorithm::kFastIva && nonlinearity) j["nonlinearity"] = std::string(ivakit::to_string(*nonlinearity));
  if (name == Algorithm::kIvaG) j["variant"] = std::string(ivakit::to_string(variant));
  return j;
}

std::vector<DensityModel> DensitySpec::build(int p, int k) const {
  std::vector<DensityModel> out;
  if (shared) {
    const DensityModel m = density_from_json(*shared, k);
    out.assign(static_cast<std::size_t>(p), m);
    return out;
  }
  require(static_cast<int>(per_scv.size()) == p, ErrorCode::kConfig,
          "density lists " + std::to_string(per_scv.size()) + " SCV models but the data has p = " + std::to_string(p));
  for (const Json& d : per_scv) out.push_back(density_from_json(d, k));
  return out;
}

Json DensitySpec::to_json() const {
  if (shared) return *shared;
  if (per_scv.empty()) return nullptr;
  Json j;
  j["scv"] = per_scv;
  return j;
}

namespace {

bool is_family(const Json& d, Family family) {
  const Json* f = fields::find(d, "family");
  return f && f->is_string() && f->get<std::string>() == to_string(family);
}

bool all_family(const DensitySpec& d, Family family) {
  if (d.shared) return is_family(*d.shared, family);
  for (const Json& j : d.per_scv)
    if (!is_family(j, family)) return false;
  return true;
}

Json toml_to_json(const toml::node& node, const std::string& where) {
  if (const auto* t = node.as_table()) {
    Json j = Json::object();
    for (const auto& [key, value] : *t) {
      const std::string k(key.str());
      j[k] = toml_to_json(value, where.empty() ? k : where + "." + k);
    }
    return j;
  }
  if (const auto* a = node.as_array()) {
    Json j = Json::array();
    for (std::size_t i = 0; i < a->size(); ++i) j.push_back(toml_to_json(*a->get(i), where + "[" + std::to_string(i) + "]"));
    return j;
  }
  if (const auto* v = node.as_string()) return v->get();
  if (const auto* v = node.as_integer()) return v->get();
  if (const auto* v = node.as_floating_point()) return v->get();
  if (const auto* v = node.as_boolean()) return v->get();
  fail(ErrorCode::kConfig, "unsupported value type at " + where + " (dates and times are not accepted)");
}

}  // namespace

void ExperimentConfig::validate() const {
  require(replicates >= 1, ErrorCode::kConfig, "replicates must be positive");
  require(condition_cap > 1.0, ErrorCode::kConfig, "condition_cap must exceed 1");
  const std::string name(to_string(algorithm.name));
  switch (algorithm.name) {
    case Algorithm::kFastIva:
      require(algorithm.nonlinearity.has_value(), ErrorCode::kConfig,
              "fastiva needs algorithm.nonlinearity (G1, G2, G3 or G4)");
      require(density.empty(), ErrorCode::kConfig, "fastiva takes a nonlinearity, not a density");
      break;
    case Algorithm::kAuxIva:
      require(!density.empty() && all_family(density, Family::kSuperGaussianRadial), ErrorCode::kConfig,
              "auxiva needs a super_gaussian density with a radial profile");
      break;
    case Algorithm::kNaturalGradient:
    case Algorithm::kNewton:
      require(!density.empty(), ErrorCode::kConfig, name + " needs a [density] section");
      break;
    case Algorithm::kIvaG:
    case Algorithm::kIvaGl:
      require(density.empty() || all_family(density, Family::kGaussian), ErrorCode::kConfig,
              name + " fixes its own source models; only a gaussian density is accepted");
      break;
    case Algorithm::kNone:
      break;
  }
  if (algorithm.name != Algorithm::kFastIva)
    require(!algorithm.nonlinearity, ErrorCode::kConfig, "algorithm.nonlinearity is only used by fastiva");
  if (problem) {
    // Builds the models once so descriptor errors surface before any compute.
    if (!density.empty()) density.build(problem->p, problem->k);
  }
}

Json ExperimentConfig::to_json() const {
  Json j;
  j["seed"] = seed;
  j["replicates"] = replicates;
  if (problem) {
    Json pj = spec_to_json(*problem);
    pj.erase("seed");
    pj["condition_cap"] = condition_cap;
    j["problem"] = std::move(pj);
  }
  j["algorithm"] = algorithm.to_json();
  if (!density.empty()) j["density"] = density.to_json();
  j["optimizer"] = optimizer_config_to_json(optimizer);
  return j;
}

ExperimentConfig parse_config_json(const Json& doc) {
  check_keys(doc, {"seed", "replicates", "output_dir", "problem", "algorithm", "density", "optimizer"}, "config");
  ExperimentConfig cfg;
  if (const Json* v = fields::find(doc, "seed")) cfg.seed = fields::seed(*v, "seed");
  if (const Json* v = fields::find(doc, "replicates")) cfg.replicates = fields::small_int(*v, "replicates");
  if (const Json* v = fields::find(doc, "output_dir")) cfg.output_dir = fields::string(*v, "output_dir");

  if (const Json* v = fields::find(doc, "problem")) {
    require(v->is_object(), ErrorCode::kConfig, "problem must be a table");
    Json pj = *v;
    require(!pj.contains("seed"), ErrorCode::kConfig,
            "problem.seed is not accepted; replicate seeds derive from the top-level seed");
    if (const Json* c = fields::find(pj, "condition_cap")) {
      cfg.condition_cap = fields::number(*c, "problem.condition_cap");
      pj.erase("condition_cap");
    }
    cfg.problem = spec_from_json(pj);
  }

  const Json* alg = fields::find(doc, "algorithm");
  require(alg != nullptr, ErrorCode::kConfig, "config needs an [algorithm] section");
  check_keys(*alg, {"name", "nonlinearity", "variant"}, "algorithm");
  const Json* name = fields::find(*alg, "name");
  require(name != nullptr, ErrorCode::kConfig, "algorithm.name is required");
  cfg.algorithm.name = algorithm_from_string(fields::string(*name, "algorithm.name"));
  if (const Json* v = fields::find(*alg, "nonlinearity"))
    cfg.algorithm.nonlinearity = nonlinearity_from_string(fields::string(*v, "algorithm.nonlinearity"));
  if (const Json* v = fields::find(*alg, "variant")) {
    require(cfg.algorithm.name == Algorithm::kIvaG, ErrorCode::kConfig, "algorithm.variant is only used by iva_g");
    cfg.algorithm.variant = iva_g_variant_from_string(fields::string(*v, "algorithm.variant"));
  }

  if (const Json* d = fields::find(doc, "density")) {
    require(d->is_object(), ErrorCode::kConfig, "density must be a table");
    if (const Json* scv = fields::find(*d, "scv")) {
      check_keys(*d, {"scv"}, "density");
      require(scv->is_array() && !scv->empty(), ErrorCode::kConfig, "density.scv must be a nonempty array of tables");
      for (const Json& e : *scv) cfg.density.per_scv.push_back(e);
    } else {
      cfg.density.shared = *d;
    }
  }

  if (cfg.algorithm.name == Algorithm::kNaturalGradient) cfg.optimizer = OptimizerConfig::gradient_defaults();
  if (const Json* v = fields::find(doc, "optimizer")) apply_optimizer_json(*v, cfg.optimizer);
  if (cfg.algorithm.name == Algorithm::kIvaG && cfg.algorithm.variant != IvaGVariant::kNewton &&
      !(fields::find(doc, "optimizer") && fields::find(doc["optimizer"], "step_size")))
    cfg.optimizer.step_size = OptimizerConfig::gradient_defaults().step_size;

  cfg.validate();
  return cfg;
}

ExperimentConfig parse_config_toml(std::string_view text) {
  toml::table table;
  try {
    table = toml::parse(text);
  } catch (const toml::parse_error& e) {
    std::ostringstream msg;
    msg << "TOML parse error at line " << e.source().begin.line << ", column " << e.source().begin.column << ": "
        << e.description();
    fail(ErrorCode::kConfig, msg.str());
  }
  return parse_config_json(toml_to_json(table, ""));
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  require(in.good(), ErrorCode::kIo, "cannot open config " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  if (path.extension() == ".json") {
    Json doc;
    try {
      doc = Json::parse(buf.str());
    } catch (const Json::parse_error& e) {
      fail(ErrorCode::kConfig, "JSON parse error in " + path.string() + ": " + e.what());
    }
    return parse_config_json(doc);
  }
  return parse_config_toml(buf.str());
}

std::vector<DensityModel> default_models(const AlgorithmChoice& algorithm, int p, int k) {
  switch (algorithm.name) {
    case Algorithm::kAuxIva:
      return std::vector<DensityModel>(static_cast<std::size_t>(p), DensityModel::super_gaussian(k));
    case Algorithm::kIvaG:
    case Algorithm::kIvaGl:
      return std::vector<DensityModel>(static_cast<std::size_t>(p), DensityModel::gaussian(k));
    default:
      return std::vector<DensityModel>(static_cast<std::size_t>(p), DensityModel::laplace(k));
  }
}

Separation separate_collection(const AlgorithmChoice& algorithm, const std::vector<DensityModel>& models,
                               const DatasetCollection& raw, const OptimizerConfig& cfg) {
  const Eigen::Index p = raw.channel_count();
  Separation out;
  if (algorithm.name == Algorithm::kNone) {
    out.unmixing.matrices.assign(raw.k_count(), Matrix::Identity(p, p));
    out.unmixing.composed_with_whitening = true;
    out.report.algorithm = "none";
    out.report.seed = cfg.seed;
    out.report.converged = true;
    out.report.final_cost = std::nan("");
    return out;
  }

  const auto [white, transform] = center_and_whiten(raw);
  const CostContext ctx{white, models};
  try {
    OptimizerResult r;
    switch (algorithm.name) {
      case Algorithm::kNaturalGradient: r = run_natural_gradient(ctx, cfg); break;
      case Algorithm::kNewton: r = run_newton(ctx, cfg); break;
      case Algorithm::kFastIva:
        r = run_fastiva(ctx, cfg,
                        FastIvaNonlinearity(algorithm.nonlinearity.value_or(NonlinearityChoice::kG2Sqrt),
                                            static_cast<int>(raw.k_count())));
        break;
      case Algorithm::kAuxIva: r = run_auxiva(ctx, cfg); break;
      case Algorithm::kIvaG: r = run_iva_g(white, cfg, algorithm.variant); break;
      case Algorithm::kIvaGl: r = run_iva_gl(white, cfg); break;
      case Algorithm::kNone: break;
    }
    out.unmixing = compose_with_whitening(r.unmixing, transform);
    out.report = std::move(r.report);
  } catch (const OptimizerError& e) {
    out.unmixing = compose_with_whitening(e.last_unmixing(), transform);
    out.report = e.partial_report();
    if (out.report.failure.empty()) out.report.failure = e.what();
    out.error = e.code();
  }
  return out;
}

}  // namespace ivakit::cli
