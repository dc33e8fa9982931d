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

#include "ivakit/cli/serialization.hpp"

#include <algorithm>
#include <charconv>

#include "ivakit/error.hpp"
#include "json_fields.hpp"

namespace ivakit::cli {

void check_keys(const Json& object, std::initializer_list<std::string_view> allowed, const std::string& where) {
  require(object.is_object(), ErrorCode::kConfig, where + " must be a table");
  for (const auto& [key, value] : object.items()) {
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end())
      fail(ErrorCode::kConfig, "unknown key '" + key + "' in " + where);
  }
}

namespace fields {

const Json* find(const Json& object, const char* key) {
  const auto it = object.find(key);
  return it == object.end() ? nullptr : &*it;
}

double number(const Json& value, const std::string& where) {
  require(value.is_number(), ErrorCode::kConfig, where + " must be a number");
  return value.get<double>();
}

std::int64_t integer(const Json& value, const std::string& where) {
  require(value.is_number_integer(), ErrorCode::kConfig, where + " must be an integer");
  if (value.is_number_unsigned()) {
    const auto u = value.get<std::uint64_t>();
    require(u <= static_cast<std::uint64_t>(INT64_MAX), ErrorCode::kConfig, where + " is out of range");
    return static_cast<std::int64_t>(u);
  }
  return value.get<std::int64_t>();
}

int small_int(const Json& value, const std::string& where) {
  const std::int64_t v = integer(value, where);
  require(v >= INT32_MIN && v <= INT32_MAX, ErrorCode::kConfig, where + " is out of range");
  return static_cast<int>(v);
}

std::uint64_t seed(const Json& value, const std::string& where) {
  if (value.is_number_unsigned()) return value.get<std::uint64_t>();
  if (value.is_number_integer()) {
    const auto v = value.get<std::int64_t>();
    require(v >= 0, ErrorCode::kConfig, where + " must be nonnegative");
    return static_cast<std::uint64_t>(v);
  }
  if (value.is_string()) {
    const std::string s = value.get<std::string>();
    std::uint64_t out = 0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
    require(ec == std::errc() && ptr == s.data() + s.size() && !s.empty(), ErrorCode::kConfig,
            where + " must be an unsigned 64-bit integer");
    return out;
  }
  fail(ErrorCode::kConfig, where + " must be an unsigned 64-bit integer");
}

bool boolean(const Json& value, const std::string& where) {
  require(value.is_boolean(), ErrorCode::kConfig, where + " must be true or false");
  return value.get<bool>();
}

std::string string(const Json& value, const std::string& where) {
  require(value.is_string(), ErrorCode::kConfig, where + " must be a string");
  return value.get<std::string>();
}

}  // namespace fields

Json matrix_to_json(const Matrix& m) {
  Json rows = Json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    Json row = Json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

Matrix matrix_from_json(const Json& rows, const std::string& where) {
  require(rows.is_array() && !rows.empty(), ErrorCode::kConfig, where + " must be a nonempty array of rows");
  const std::size_t cols = rows.front().is_array() ? rows.front().size() : 0;
  require(cols > 0, ErrorCode::kConfig, where + " rows must be nonempty arrays");
  Matrix m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(cols));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    require(rows[i].is_array() && rows[i].size() == cols, ErrorCode::kConfig, where + " is not rectangular");
    for (std::size_t j = 0; j < cols; ++j)
      m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = fields::number(rows[i][j], where);
  }
  return m;
}

namespace {

Vector vector_from_json(const Json& values, const std::string& where) {
  require(values.is_array() && !values.empty(), ErrorCode::kConfig, where + " must be a nonempty array");
  Vector v(static_cast<Eigen::Index>(values.size()));
  for (std::size_t i = 0; i < values.size(); ++i) v(static_cast<Eigen::Index>(i)) = fields::number(values[i], where);
  return v;
}

template <typename F>
auto as_config(F&& f) {
  try {
    return f();
  } catch (const Error& e) {
    if (e.code() == ErrorCode::kConfig) throw;
    throw Error(ErrorCode::kConfig, std::string("invalid density descriptor: ") + e.what());
  }
}

}  // namespace

Json density_to_json(const DensityModel& model) {
  Json j;
  j["family"] = std::string(to_string(model.family()));
  if (model.family() == Family::kMixed) {
    const auto& mp = std::get<MixedParams>(model.params());
    j["epsilon"] = mp.epsilon;
    j["component_a"] = density_to_json(*mp.component_a);
    j["component_b"] = density_to_json(*mp.component_b);
    return j;
  }
  Json loc = Json::array();
  for (Eigen::Index i = 0; i < model.location().size(); ++i) loc.push_back(model.location()(i));
  j["location"] = std::move(loc);
  j["scatter"] = matrix_to_json(model.scatter());
  std::visit(
      [&j](const auto& p) {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, StudentTParams>) {
          j["nu"] = p.nu;
        } else if constexpr (std::is_same_v<T, KotzParams>) {
          j["beta"] = p.beta;
          j["eta"] = p.eta;
          j["lambda"] = p.lambda;
        } else if constexpr (std::is_same_v<T, MggdParams>) {
          j["alpha"] = p.alpha;
          j["beta"] = p.beta;
        } else if constexpr (std::is_same_v<T, RadialParams>) {
          j["profile"] = std::string(to_string(p.profile));
          j["scale"] = p.scale;
          j["shape"] = p.shape;
        }
      },
      model.params());
  return j;
}

DensityModel density_from_json(const Json& d, int k_dim) {
  require(d.is_object(), ErrorCode::kConfig, "density descriptor must be a table");
  const Json* fam = fields::find(d, "family");
  require(fam != nullptr, ErrorCode::kConfig, "density descriptor needs a family");
  const Family family = as_config([&] { return family_from_string(fields::string(*fam, "density.family")); });

  if (family == Family::kMixed) {
    check_keys(d, {"family", "epsilon", "component_a", "component_b"}, "mixed density");
    const Json* eps = fields::find(d, "epsilon");
    const Json* a = fields::find(d, "component_a");
    const Json* b = fields::find(d, "component_b");
    require(a && b, ErrorCode::kConfig, "mixed density needs component_a and component_b");
    const double e = eps ? fields::number(*eps, "density.epsilon") : 0.5;
    return as_config(
        [&] { return DensityModel::mixed(e, density_from_json(*a, k_dim), density_from_json(*b, k_dim)); });
  }

  const Json* loc_j = fields::find(d, "location");
  const Json* sc_j = fields::find(d, "scatter");
  const Vector loc = loc_j ? vector_from_json(*loc_j, "density.location") : Vector::Zero(k_dim);
  const Matrix scatter = sc_j ? matrix_from_json(*sc_j, "density.scatter") : Matrix::Identity(k_dim, k_dim);
  require(loc.size() == k_dim && scatter.rows() == k_dim && scatter.cols() == k_dim, ErrorCode::kConfig,
          "density location/scatter must have dimension K = " + std::to_string(k_dim));
  auto num = [&](const char* key, double fallback) {
    const Json* v = fields::find(d, key);
    return v ? fields::number(*v, std::string("density.") + key) : fallback;
  };

  return as_config([&]() -> DensityModel {
    switch (family) {
      case Family::kGaussian:
        check_keys(d, {"family", "location", "scatter"}, "gaussian density");
        return DensityModel::gaussian(loc, scatter);
      case Family::kLaplace:
        check_keys(d, {"family", "location", "scatter"}, "laplace density");
        return DensityModel::laplace(loc, scatter);
      case Family::kStudentT:
        check_keys(d, {"family", "location", "scatter", "nu"}, "student_t density");
        return DensityModel::student_t(loc, scatter, num("nu", StudentTParams{}.nu));
      case Family::kKotz: {
        check_keys(d, {"family", "location", "scatter", "beta", "eta", "lambda"}, "kotz density");
        const KotzParams def;
        return DensityModel::kotz(loc, scatter, {num("beta", def.beta), num("eta", def.eta), num("lambda", def.lambda)});
      }
      case Family::kMggd: {
        check_keys(d, {"family", "location", "scatter", "alpha", "beta"}, "mggd density");
        const MggdParams def;
        return DensityModel::mggd(loc, scatter, {num("alpha", def.alpha), num("beta", def.beta)});
      }
      case Family::kSuperGaussianRadial: {
        check_keys(d, {"family", "location", "scatter", "profile", "scale", "shape"}, "super_gaussian density");
        RadialParams rp;
        if (const Json* pr = fields::find(d, "profile"))
          rp.profile = radial_profile_from_string(fields::string(*pr, "density.profile"));
        rp.scale = num("scale", rp.scale);
        rp.shape = num("shape", rp.shape);
        return DensityModel::super_gaussian(loc, scatter, rp);
      }
      case Family::kMixed:
        break;
    }
    fail(ErrorCode::kConfig, "unsupported density family");
  });
}

Json spec_to_json(const ScvSpec& spec) {
  Json j;
  j["p"] = spec.p;
  j["k"] = spec.k;
  j["n"] = spec.n;
  j["family"] = std::string(to_string(spec.family));
  j["covariance_style"] = std::string(to_string(spec.covariance_style));
  j["ar1_phi"] = spec.ar1_phi;
  j["min_cross_correlation"] = spec.min_cross_correlation;
  j["seed"] = spec.seed;
  return j;
}

ScvSpec spec_from_json(const Json& o) {
  check_keys(o, {"p", "k", "n", "family", "covariance_style", "ar1_phi", "min_cross_correlation", "seed"},
             "problem");
  ScvSpec s;
  if (const Json* v = fields::find(o, "p")) s.p = fields::small_int(*v, "problem.p");
  if (const Json* v = fields::find(o, "k")) s.k = fields::small_int(*v, "problem.k");
  if (const Json* v = fields::find(o, "n")) s.n = fields::small_int(*v, "problem.n");
  if (const Json* v = fields::find(o, "family")) s.family = scv_family_from_string(fields::string(*v, "problem.family"));
  if (const Json* v = fields::find(o, "covariance_style"))
    s.covariance_style = covariance_style_from_string(fields::string(*v, "problem.covariance_style"));
  if (const Json* v = fields::find(o, "ar1_phi")) s.ar1_phi = fields::number(*v, "problem.ar1_phi");
  if (const Json* v = fields::find(o, "min_cross_correlation"))
    s.min_cross_correlation = fields::number(*v, "problem.min_cross_correlation");
  if (const Json* v = fields::find(o, "seed")) s.seed = fields::seed(*v, "problem.seed");
  try {
    s.validate();
  } catch (const Error& e) {
    throw Error(ErrorCode::kConfig, std::string("invalid problem: ") + e.what());
  }
  return s;
}

Json optimizer_config_to_json(const OptimizerConfig& cfg) {
  Json j;
  j["step_size"] = cfg.step_size;
  j["max_iterations"] = cfg.max_iterations;
  j["tolerance"] = cfg.tolerance;
  j["init"] = std::string(to_string(cfg.init));
  j["scatter_ridge"] = cfg.scatter_ridge;
  j["hessian_fallback"] = cfg.hessian_fallback;
  j["refresh_gaussian_scatter"] = cfg.refresh_gaussian_scatter;
  return j;
}

void apply_optimizer_json(const Json& o, OptimizerConfig& cfg) {
  check_keys(o, {"step_size", "max_iterations", "tolerance", "init", "scatter_ridge", "hessian_fallback",
                 "refresh_gaussian_scatter"},
             "optimizer");
  if (const Json* v = fields::find(o, "step_size")) cfg.step_size = fields::number(*v, "optimizer.step_size");
  if (const Json* v = fields::find(o, "max_iterations"))
    cfg.max_iterations = fields::small_int(*v, "optimizer.max_iterations");
  if (const Json* v = fields::find(o, "tolerance")) cfg.tolerance = fields::number(*v, "optimizer.tolerance");
  if (const Json* v = fields::find(o, "init")) {
    cfg.init = init_kind_from_string(fields::string(*v, "optimizer.init"));
    require(cfg.init != InitKind::kProvided, ErrorCode::kConfig, "optimizer.init = \"provided\" is not available from a config");
  }
  if (const Json* v = fields::find(o, "scatter_ridge")) cfg.scatter_ridge = fields::number(*v, "optimizer.scatter_ridge");
  if (const Json* v = fields::find(o, "hessian_fallback"))
    cfg.hessian_fallback = fields::boolean(*v, "optimizer.hessian_fallback");
  if (const Json* v = fields::find(o, "refresh_gaussian_scatter"))
    cfg.refresh_gaussian_scatter = fields::boolean(*v, "optimizer.refresh_gaussian_scatter");
  try {
    cfg.validate();
  } catch (const Error& e) {
    throw Error(ErrorCode::kConfig, std::string("invalid optimizer settings: ") + e.what());
  }
}

Json report_to_json(const ConvergenceReport& r, bool include_wall_time) {
  Json j;
  j["algorithm"] = r.algorithm;
  j["seed"] = r.seed;
  j["iterations_run"] = r.iterations_run;
  j["converged"] = r.converged;
  j["final_cost"] = r.final_cost;
  j["cost_trace"] = r.cost_trace;
  j["criterion_trace"] = r.criterion_trace;
  j["stage_trace"] = r.stage_trace;
  if (include_wall_time) j["wall_time_seconds"] = r.wall_time_seconds;
  j["failure"] = r.failure.empty() ? Json(nullptr) : Json(r.failure);
  return j;
}

ConvergenceReport report_from_json(const Json& o) {
  check_keys(o, {"algorithm", "seed", "iterations_run", "converged", "final_cost", "cost_trace",
                 "criterion_trace", "stage_trace", "wall_time_seconds", "failure"},
             "convergence report");
  ConvergenceReport r;
  auto get = [&](const char* key) -> const Json& {
    const Json* v = fields::find(o, key);
    require(v != nullptr, ErrorCode::kConfig, std::string("convergence report lacks '") + key + "'");
    return *v;
  };
  r.algorithm = fields::string(get("algorithm"), "algorithm");
  r.seed = fields::seed(get("seed"), "seed");
  r.iterations_run = fields::small_int(get("iterations_run"), "iterations_run");
  r.converged = fields::boolean(get("converged"), "converged");
  // Non-finite costs are written as null.
  auto number_or_nan = [](const Json& v) { return v.is_null() ? std::nan("") : fields::number(v, "cost"); };
  r.final_cost = number_or_nan(get("final_cost"));
  for (const Json& v : get("cost_trace")) r.cost_trace.push_back(number_or_nan(v));
  for (const Json& v : get("criterion_trace")) r.criterion_trace.push_back(number_or_nan(v));
  for (const Json& v : get("stage_trace")) r.stage_trace.push_back(fields::small_int(v, "stage"));
  if (const Json* v = fields::find(o, "wall_time_seconds")) r.wall_time_seconds = fields::number(*v, "wall_time_seconds");
  const Json& f = get("failure");
  if (!f.is_null()) r.failure = fields::string(f, "failure");
  return r;
}

Json alignment_to_json(const Alignment& a) {
  Json j;
  j["permutation"] = a.permutation;
  j["signs"] = matrix_to_json(a.signs);
  return j;
}

}  // namespace ivakit::cli
