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

#include <chrono>
#include <cmath>
#include <string>

#include "driver.hpp"
#include "ivakit/rng.hpp"

namespace ivakit {

namespace {
constexpr std::uint64_t kInitStream = 0x1417;
}

std::string_view to_string(InitKind kind) {
  switch (kind) {
    case InitKind::kIdentity: return "identity";
    case InitKind::kRandomOrthogonal: return "random_orthogonal";
    case InitKind::kProvided: return "provided";
  }
  return "unknown";
}

InitKind init_kind_from_string(std::string_view name) {
  for (InitKind k : {InitKind::kIdentity, InitKind::kRandomOrthogonal, InitKind::kProvided})
    if (to_string(k) == name) return k;
  fail(ErrorCode::kConfig, "unknown init '" + std::string(name) + "'");
}

void OptimizerConfig::validate() const {
  require(step_size >= 0.0 && step_size <= 1.0, ErrorCode::kParameter, "step size must lie in [0, 1]");
  require(max_iterations >= 1, ErrorCode::kParameter, "max_iterations must be positive");
  require(tolerance > 0.0, ErrorCode::kParameter, "tolerance must be positive");
  require(scatter_ridge >= 0.0, ErrorCode::kParameter, "scatter_ridge must be nonnegative");
  if (init == InitKind::kProvided)
    require(initial.has_value(), ErrorCode::kParameter, "provided init needs an initial unmixing set");
}

double convergence_criterion(const UnmixingSet& prev, const UnmixingSet& next) {
  require(prev.k_count() == next.k_count(), ErrorCode::kShape, "unmixing sets differ in K");
  double worst = 0.0;
  for (std::size_t k = 0; k < prev.k_count(); ++k) {
    const Matrix& a = prev.matrices[k];
    const Matrix& b = next.matrices[k];
    require(a.rows() == b.rows() && a.cols() == b.cols(), ErrorCode::kShape, "unmixing shapes differ");
    for (Eigen::Index j = 0; j < a.rows(); ++j) {
      const double na = a.row(j).norm();
      const double nb = b.row(j).norm();
      require(na > 0.0 && nb > 0.0, ErrorCode::kDegenerateUnmixing,
              "zero-norm unmixing row " + std::to_string(j) + " in dataset " + std::to_string(k));
      const double c = std::min(1.0, std::abs(a.row(j).dot(b.row(j))) / (na * nb));
      worst = std::max(worst, 1.0 - c);
    }
  }
  return worst;
}

UnmixingSet initial_unmixing(const OptimizerConfig& cfg, Eigen::Index p, std::size_t k_count) {
  UnmixingSet w;
  switch (cfg.init) {
    case InitKind::kIdentity:
      w.matrices.assign(k_count, Matrix::Identity(p, p));
      break;
    case InitKind::kRandomOrthogonal: {
      const CounterRng base = CounterRng(cfg.seed).split(kInitStream);
      for (std::size_t k = 0; k < k_count; ++k) {
        CounterRng rng = base.split(k);
        w.matrices.push_back(random_orthogonal(rng, p));
      }
      break;
    }
    case InitKind::kProvided:
      require(cfg.initial.has_value(), ErrorCode::kParameter, "provided init needs an initial unmixing set");
      w = *cfg.initial;
      break;
  }
  return w;
}

std::vector<DensityModel> refresh_gaussian_models(const std::vector<DensityModel>& models,
                                                  const SourceEstimates& sources, double ridge) {
  std::vector<DensityModel> out;
  out.reserve(models.size());
  for (std::size_t j = 0; j < models.size(); ++j) {
    if (models[j].family() != Family::kGaussian) {
      out.push_back(models[j]);
      continue;
    }
    Matrix scatter = estimate_scatter(sources.scvs[j], ridge);
    if (Eigen::LLT<Matrix>(scatter).info() != Eigen::Success)
      scatter = estimate_scatter(sources.scvs[j], std::max(ridge, 1e-8));
    out.push_back(models[j].with_scatter(scatter));
  }
  return out;
}

namespace detail {

UnmixingSet resolve_start(const OptimizerConfig& cfg, Eigen::Index p, std::size_t k_count) {
  cfg.validate();
  UnmixingSet w = initial_unmixing(cfg, p, k_count);
  require(w.k_count() == k_count, ErrorCode::kShape, "initial unmixing set has the wrong K");
  for (const Matrix& m : w.matrices)
    require(m.rows() == p && m.cols() == p, ErrorCode::kShape, "initial unmixing matrix is not p x p");
  return w;
}

void normalize_row_variance(UnmixingSet& unmixing, const DatasetCollection& data, Eigen::Index j) {
  for (std::size_t k = 0; k < unmixing.k_count(); ++k) {
    const Eigen::RowVectorXd s = unmixing.matrices[k].row(j) * data.dataset(k);
    const double mean = s.mean();
    const double var = (s.array() - mean).square().mean();
    require(var > 0.0 && std::isfinite(var), ErrorCode::kDegenerateUnmixing,
            "SCV " + std::to_string(j) + " has zero variance in dataset " + std::to_string(k));
    unmixing.matrices[k].row(j) /= std::sqrt(var);
  }
}

OptimizerResult drive(const std::string& algorithm, const OptimizerConfig& cfg, UnmixingSet start,
                      double det_floor, const StepFn& step, const EvaluateFn& evaluate, int stage) {
  const auto t0 = std::chrono::steady_clock::now();
  ConvergenceReport report;
  report.algorithm = algorithm;
  report.seed = cfg.seed;
  UnmixingSet current = std::move(start);

  auto elapsed = [&] {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  };
  auto abort = [&](ErrorCode code, const std::string& msg) {
    report.failure = msg;
    report.wall_time_seconds = elapsed();
    if (!report.cost_trace.empty()) report.final_cost = report.cost_trace.back();
    throw OptimizerError(code, algorithm + ": " + msg, report, current);
  };

  try {
    const double c0 = evaluate(current);
    if (!std::isfinite(c0)) abort(ErrorCode::kNumericalFailure, "non-finite cost at the starting point");
    report.cost_trace.push_back(c0);
    report.stage_trace.push_back(stage);

    for (int it = 1; it <= cfg.max_iterations; ++it) {
      UnmixingSet next = step(current);
      for (const Matrix& m : next.matrices)
        if (!m.allFinite()) abort(ErrorCode::kNumericalFailure, "non-finite iterate at iteration " + std::to_string(it));
      const double crit = convergence_criterion(current, next);
      current = std::move(next);
      const double c = evaluate(current);
      if (!std::isfinite(c)) abort(ErrorCode::kNumericalFailure, "non-finite cost at iteration " + std::to_string(it));
      report.cost_trace.push_back(c);
      report.stage_trace.push_back(stage);
      report.criterion_trace.push_back(crit);
      report.iterations_run = it;
      if (cfg.observer) cfg.observer(IterationInfo{it, stage, current, c, crit});
      if (cfg.step_size > 0.0 && crit <= cfg.tolerance) {
        report.converged = true;
        break;
      }
    }
    current.check_determinants(det_floor);
  } catch (const OptimizerError&) {
    throw;
  } catch (const Error& e) {
    abort(e.code(), e.what());
  }
  report.final_cost = report.cost_trace.back();
  report.wall_time_seconds = elapsed();
  return {std::move(current), std::move(report)};
}

}  // namespace detail
}  // namespace ivakit
