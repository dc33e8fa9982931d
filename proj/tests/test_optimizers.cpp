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

#include <cmath>
#include <random>
#include <stdexcept>

#include "doctest.h"
#include "ivakit/error.hpp"
#include "ivakit/metrics.hpp"
#include "ivakit/optimizers.hpp"
#include "ivakit/rng.hpp"
#include "ivakit/simgen.hpp"

using namespace ivakit;

namespace {

struct Problem {
  DatasetCollection white;
  WhiteningTransform transform;
  MixingSet mixing;
};

Problem laplace_problem(std::uint64_t seed, int p = 3, int k = 3, int n = 4000) {
  ScvSpec spec;
  spec.p = p;
  spec.k = k;
  spec.n = n;
  spec.family = ScvFamily::kLaplace;
  spec.seed = seed;
  const GeneratedSources g = gen_scv_sources(spec);
  MixingSet m = gen_mixing(p, k, 20.0, seed + 100);
  auto [white, tr] = center_and_whiten(mix(g.sources, m));
  return {std::move(white), std::move(tr), std::move(m)};
}

Problem gaussian_problem(std::uint64_t seed, int p = 3, int k = 3, int n = 4000) {
  ScvSpec spec;
  spec.p = p;
  spec.k = k;
  spec.n = n;
  spec.family = ScvFamily::kGaussian;
  spec.seed = seed;
  const GeneratedSources g = gen_scv_sources(spec);
  MixingSet m = gen_mixing(p, k, 20.0, seed + 100);
  auto [white, tr] = center_and_whiten(mix(g.sources, m));
  return {std::move(white), std::move(tr), std::move(m)};
}

double recovered_jisi(const OptimizerResult& r, const Problem& prob) {
  return joint_isi(gain_matrices(compose_with_whitening(r.unmixing, prob.transform), prob.mixing));
}

std::vector<DensityModel> laplace_models(int p, int k) {
  return std::vector<DensityModel>(static_cast<std::size_t>(p), DensityModel::laplace(k));
}

bool bit_equal(const UnmixingSet& a, const UnmixingSet& b) {
  if (a.k_count() != b.k_count()) return false;
  for (std::size_t k = 0; k < a.k_count(); ++k)
    if (a.matrices[k] != b.matrices[k]) return false;
  return true;
}

}  // namespace

TEST_CASE("convergence criterion") {
  UnmixingSet a;
  a.matrices = {Matrix::Random(3, 3), Matrix::Random(3, 3)};
  CHECK(convergence_criterion(a, a) == doctest::Approx(0.0).epsilon(1e-15));

  UnmixingSet b = a;
  b.matrices[0].row(1) *= -4.0;
  b.matrices[1] *= 0.5;
  CHECK(convergence_criterion(a, b) <= 1e-15);

  UnmixingSet e, f;
  e.matrices = {Matrix::Identity(2, 2)};
  f.matrices = {Matrix::Identity(2, 2)};
  f.matrices[0].row(0) << 0.0, 1.0;
  CHECK(convergence_criterion(e, f) == 1.0);

  f.matrices[0].row(0).setZero();
  CHECK_THROWS_AS(convergence_criterion(e, f), Error);
}

TEST_CASE("initial unmixing and config validation") {
  OptimizerConfig cfg;
  cfg.init = InitKind::kIdentity;
  UnmixingSet w = initial_unmixing(cfg, 3, 2);
  CHECK(w.matrices[1] == Matrix::Identity(3, 3));

  cfg.init = InitKind::kRandomOrthogonal;
  cfg.seed = 11;
  w = initial_unmixing(cfg, 4, 3);
  for (const Matrix& m : w.matrices) CHECK((m * m.transpose() - Matrix::Identity(4, 4)).norm() <= 1e-12);
  CHECK(bit_equal(w, initial_unmixing(cfg, 4, 3)));
  cfg.seed = 12;
  CHECK_FALSE(bit_equal(w, initial_unmixing(cfg, 4, 3)));

  cfg.init = InitKind::kProvided;
  CHECK_THROWS_AS(cfg.validate(), Error);
  cfg.init = InitKind::kIdentity;
  cfg.step_size = 1.5;
  CHECK_THROWS_AS(cfg.validate(), Error);
  cfg.step_size = -0.1;
  CHECK_THROWS_AS(cfg.validate(), Error);

  CHECK(init_kind_from_string("random_orthogonal") == InitKind::kRandomOrthogonal);
  CHECK(iva_g_variant_from_string("vector_gradient") == IvaGVariant::kVectorGradient);
  try {
    init_kind_from_string("eye");
    FAIL("expected throw");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kConfig);
  }
  CHECK(OptimizerConfig::gradient_defaults().step_size == 0.1);
}

TEST_CASE("refresh touches only Gaussian models") {
  const Problem prob = gaussian_problem(2);
  std::vector<DensityModel> models{DensityModel::gaussian(3), DensityModel::laplace(3), DensityModel::gaussian(3)};
  UnmixingSet w;
  w.matrices.assign(3, Matrix::Identity(3, 3));
  const SourceEstimates s = apply_unmixing(w, prob.white);
  const auto out = refresh_gaussian_models(models, s, 0.0);
  CHECK((out[0].scatter() - estimate_scatter(s.scvs[0], 0.0)).norm() <= 1e-14);
  CHECK(out[1].scatter() == Matrix::Identity(3, 3));
  CHECK(out[1].family() == Family::kLaplace);
}

TEST_CASE("zero step leaves W unchanged and never converges") {
  const Problem prob = laplace_problem(1, 3, 2, 1000);
  CostContext ctx{prob.white, laplace_models(3, 2)};
  OptimizerConfig cfg;
  cfg.step_size = 0.0;
  cfg.max_iterations = 5;
  cfg.seed = 4;
  const OptimizerResult r = run_natural_gradient(ctx, cfg);
  CHECK(bit_equal(r.unmixing, initial_unmixing(cfg, 3, 2)));
  CHECK_FALSE(r.report.converged);
  CHECK(r.report.iterations_run == 5);
  CHECK(r.report.cost_trace.size() == 6);
  CHECK(r.report.criterion_trace.size() == 5);
  for (double c : r.report.criterion_trace) CHECK(c == 0.0);
}

TEST_CASE("natural gradient and Newton separate Laplace SCVs") {
  const Problem prob = laplace_problem(5);
  CostContext ctx{prob.white, laplace_models(3, 3)};

  OptimizerConfig ng = OptimizerConfig::gradient_defaults();
  ng.seed = 5;
  const OptimizerResult a = run_natural_gradient(ctx, ng);
  CHECK(a.report.converged);
  CHECK(recovered_jisi(a, prob) <= 0.1);
  CHECK(a.report.cost_trace.back() < a.report.cost_trace.front());

  OptimizerConfig nt = OptimizerConfig::newton_defaults();
  nt.seed = 5;
  const OptimizerResult b = run_newton(ctx, nt);
  CHECK(b.report.converged);
  CHECK(b.report.algorithm == "newton");
  CHECK(recovered_jisi(b, prob) <= 0.1);
  CHECK(b.report.iterations_run < a.report.iterations_run);
  CHECK(b.report.final_cost == doctest::Approx(iva_cost(ctx, b.unmixing)).epsilon(1e-12));
}

TEST_CASE("Newton started at its own solution stops at once") {
  const Problem prob = laplace_problem(6);
  CostContext ctx{prob.white, laplace_models(3, 3)};
  OptimizerConfig cfg;
  cfg.seed = 6;
  cfg.tolerance = 1e-10;
  const OptimizerResult first = run_newton(ctx, cfg);
  REQUIRE(first.report.converged);

  cfg.init = InitKind::kProvided;
  cfg.initial = first.unmixing;
  cfg.tolerance = 1e-8;
  const OptimizerResult again = run_newton(ctx, cfg);
  CHECK(again.report.converged);
  CHECK(again.report.iterations_run <= 2);
}

TEST_CASE("Newton without fallback reports numerical failure on an indefinite Hessian") {
  // Kotz with eta > 1 has a log-barrier term, so the row Hessian is indefinite at the start.
  const Problem prob = laplace_problem(7, 3, 2, 500);
  std::vector<DensityModel> models(3, DensityModel::kotz(Vector::Zero(2), Matrix::Identity(2, 2), KotzParams{1.0, 2.0, 0.5}));
  CostContext ctx{prob.white, models};
  OptimizerConfig cfg;
  cfg.hessian_fallback = false;
  cfg.seed = 7;
  cfg.max_iterations = 50;
  bool threw = false;
  try {
    run_newton(ctx, cfg);
  } catch (const OptimizerError& e) {
    threw = true;
    CHECK(e.code() == ErrorCode::kNumericalFailure);
    CHECK_FALSE(e.partial_report().failure.empty());
  }
  CHECK(threw);
  cfg.hessian_fallback = true;
  CHECK_NOTHROW(run_newton(ctx, cfg));
}

TEST_CASE("FastIVA keeps W orthogonal and separates") {
  const Problem prob = laplace_problem(8);
  CostContext ctx{prob.white, laplace_models(3, 3)};
  OptimizerConfig cfg;
  cfg.seed = 8;
  double worst = 0.0;
  cfg.observer = [&](const IterationInfo& info) {
    for (const Matrix& m : info.unmixing.matrices)
      worst = std::max(worst, (m * m.transpose() - Matrix::Identity(3, 3)).norm());
  };
  const OptimizerResult r = run_fastiva(ctx, cfg, FastIvaNonlinearity(NonlinearityChoice::kG2Sqrt));
  CHECK(worst <= 1e-10);
  CHECK(r.report.converged);
  CHECK(recovered_jisi(r, prob) <= 0.1);

  for (NonlinearityChoice g : {NonlinearityChoice::kG1Log, NonlinearityChoice::kG3Mixed}) {
    const OptimizerResult rg = run_fastiva(ctx, cfg, FastIvaNonlinearity(g, 3));
    CHECK(recovered_jisi(rg, prob) <= 0.1);
  }
}

TEST_CASE("FastIVA requires white data") {
  const Problem prob = laplace_problem(9, 3, 2, 1000);
  MatrixList raw = prob.white.datasets();
  raw[1] *= 2.0;
  CostContext ctx{DatasetCollection(raw), laplace_models(3, 2)};
  try {
    run_fastiva(ctx, OptimizerConfig{}, FastIvaNonlinearity(NonlinearityChoice::kG2Sqrt));
    FAIL("expected throw");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kPrecondition);
  }
}

TEST_CASE("K = 1 reduces to ICA") {
  CounterRng rng(10);
  const int n = 5000;
  Matrix s(2, n);
  std::exponential_distribution<double> expo(1.0);
  std::bernoulli_distribution coin(0.5);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < 2; ++j) s(j, i) = (coin(rng) ? 1.0 : -1.0) * expo(rng) / std::sqrt(2.0);
  Matrix a(2, 2);
  a << 1.0, 0.6, -0.4, 1.2;
  auto [white, tr] = center_and_whiten(DatasetCollection({a * s}));
  CostContext ctx{white, laplace_models(2, 1)};
  OptimizerConfig cfg;
  cfg.seed = 10;
  const OptimizerResult r = run_fastiva(ctx, cfg, FastIvaNonlinearity(NonlinearityChoice::kG2Sqrt));
  const UnmixingSet w = compose_with_whitening(r.unmixing, tr);
  CHECK(isi(w.matrices[0] * a) <= 0.1);
  SUBCASE("Newton falls back to the gradient on the rank-one Laplace Hessian") {
    const OptimizerResult rn = run_newton(ctx, cfg);
    CHECK(rn.report.converged);
    CHECK(isi(compose_with_whitening(rn.unmixing, tr).matrices[0] * a) <= 0.05);
  }
}

TEST_CASE("AuxIVA row update solves the projection equations") {
  const Matrix w = Matrix::Random(4, 4) + 2.0 * Matrix::Identity(4, 4);
  const Matrix b = Matrix::Random(4, 4);
  const Matrix v = b * b.transpose() + Matrix::Identity(4, 4);
  const Vector row = auxiva_row_update(w, v, 2);
  CHECK(row.dot(v * row) == doctest::Approx(1.0).epsilon(1e-12));
  for (Eigen::Index i = 0; i < 4; ++i)
    if (i != 2) CHECK(std::abs(w.row(i).dot(v * row)) <= 1e-12);

  CHECK_THROWS_AS(auxiva_row_update(Matrix::Zero(4, 4), v, 0), Error);
}

TEST_CASE("AuxIVA weighted covariance with a constant radius") {
  const Problem prob = laplace_problem(13, 3, 2, 1000);
  const Matrix& x = prob.white.dataset(0);
  const Vector r = Vector::Constant(x.cols(), 2.0);
  const Matrix v = auxiva_weighted_covariance(x, r, RadialParams{});
  const Matrix c = x * x.transpose() / static_cast<double>(x.cols());
  CHECK((v - 0.5 * c).norm() <= 1e-12);
}

TEST_CASE("AuxIVA decreases the cost monotonically") {
  const Problem prob = laplace_problem(14);
  CostContext ctx{prob.white, std::vector<DensityModel>(3, DensityModel::super_gaussian(3))};
  OptimizerConfig cfg;
  cfg.seed = 14;
  const OptimizerResult r = run_auxiva(ctx, cfg);
  const auto& t = r.report.cost_trace;
  for (std::size_t i = 1; i < t.size(); ++i) CHECK(t[i] <= t[i - 1] + 1e-9);
  CHECK(recovered_jisi(r, prob) <= 0.1);

  CostContext bad{prob.white, laplace_models(3, 3)};
  CHECK_THROWS_AS(run_auxiva(bad, cfg), Error);
}

TEST_CASE("IVA-G variants agree") {
  const Problem prob = gaussian_problem(15);
  OptimizerConfig newton;
  newton.seed = 15;
  newton.tolerance = 1e-9;
  const OptimizerResult a = run_iva_g(prob.white, newton, IvaGVariant::kNewton);
  CHECK(a.report.algorithm == "iva_g_newton");
  CHECK(a.report.final_cost == iva_g_cost(a.unmixing, prob.white, newton.scatter_ridge));

  OptimizerConfig grad = newton;
  grad.step_size = 0.1;
  grad.max_iterations = 5000;
  const OptimizerResult b = run_iva_g(prob.white, grad, IvaGVariant::kVectorGradient);
  const OptimizerResult c = run_iva_g(prob.white, grad, IvaGVariant::kMatrixGradient);
  CHECK(b.report.final_cost == doctest::Approx(a.report.final_cost).epsilon(1e-3));
  CHECK(c.report.final_cost == doctest::Approx(a.report.final_cost).epsilon(1e-3));
  CHECK(recovered_jisi(a, prob) <= 0.1);
}

TEST_CASE("IVA-GL runs two stages") {
  const Problem prob = laplace_problem(16);
  OptimizerConfig cfg;
  cfg.seed = 16;
  std::vector<int> stages;
  cfg.observer = [&](const IterationInfo& info) { stages.push_back(info.stage); };
  const OptimizerResult r = run_iva_gl(prob.white, cfg);
  CHECK(r.report.algorithm == "iva_gl");

  OptimizerConfig first_cfg = cfg;
  first_cfg.observer = nullptr;
  const OptimizerResult first = run_iva_g(prob.white, first_cfg, IvaGVariant::kNewton);
  const auto& st = r.report.stage_trace;
  REQUIRE(st.size() == r.report.cost_trace.size());
  const auto n1 = first.report.cost_trace.size();
  for (std::size_t i = 0; i < st.size(); ++i) CHECK(st[i] == (i < n1 ? 1 : 2));
  CHECK(r.report.iterations_run == static_cast<int>(r.report.criterion_trace.size()));
  CHECK(stages.front() == 1);
  CHECK(stages.back() == 2);

  const CostContext lap{prob.white, laplace_models(3, 3)};
  CHECK(r.report.cost_trace[n1] == iva_cost(lap, first.unmixing));
  CHECK(recovered_jisi(r, prob) <= 0.1);
}

TEST_CASE("Newton is equivariant under an orthogonal change of coordinates") {
  const Problem prob = laplace_problem(17, 3, 2, 2000);
  CounterRng rng(17);
  const Matrix q = random_orthogonal(rng, 3);
  MatrixList rotated;
  for (const Matrix& x : prob.white.datasets()) rotated.push_back(q * x);

  OptimizerConfig cfg;
  cfg.seed = 17;
  cfg.max_iterations = 10;
  const UnmixingSet start = initial_unmixing(cfg, 3, 2);
  const OptimizerResult a = run_newton(CostContext{prob.white, laplace_models(3, 2)}, cfg);

  cfg.init = InitKind::kProvided;
  cfg.initial = start;
  for (Matrix& m : cfg.initial->matrices) m = m * q.transpose();
  const OptimizerResult b = run_newton(CostContext{DatasetCollection(rotated), laplace_models(3, 2)}, cfg);
  for (std::size_t k = 0; k < 2; ++k)
    CHECK((b.unmixing.matrices[k] - a.unmixing.matrices[k] * q.transpose()).norm() <= 1e-8);
}

TEST_CASE("runs are bit-deterministic") {
  const Problem prob = laplace_problem(18, 3, 2, 1000);
  CostContext ctx{prob.white, laplace_models(3, 2)};
  OptimizerConfig cfg;
  cfg.seed = 18;
  const OptimizerResult a = run_newton(ctx, cfg);
  const OptimizerResult b = run_newton(ctx, cfg);
  CHECK(bit_equal(a.unmixing, b.unmixing));
  CHECK(a.report.cost_trace == b.report.cost_trace);
  const OptimizerResult c = run_iva_g(prob.white, cfg, IvaGVariant::kNewton);
  const OptimizerResult d = run_iva_g(prob.white, cfg, IvaGVariant::kNewton);
  CHECK(bit_equal(c.unmixing, d.unmixing));
}

TEST_CASE("a failing observer yields a partial report") {
  const Problem prob = laplace_problem(19, 3, 2, 1000);
  CostContext ctx{prob.white, laplace_models(3, 2)};
  OptimizerConfig cfg;
  cfg.seed = 19;
  cfg.tolerance = 1e-14;
  cfg.observer = [](const IterationInfo& info) {
    if (info.iteration == 3) throw Error(ErrorCode::kNumericalFailure, "stop");
  };
  try {
    run_newton(ctx, cfg);
    FAIL("expected throw");
  } catch (const OptimizerError& e) {
    CHECK(e.partial_report().iterations_run == 3);
    CHECK(e.partial_report().cost_trace.size() == 4);
    CHECK(e.partial_report().failure == "stop");
    CHECK(e.last_unmixing().k_count() == 2);
  }
}

TEST_CASE("model count and dimension are checked") {
  const Problem prob = laplace_problem(20, 3, 2, 500);
  CostContext ctx{prob.white, laplace_models(2, 2)};
  CHECK_THROWS_AS(run_newton(ctx, OptimizerConfig{}), Error);
  ctx.models = laplace_models(3, 3);
  CHECK_THROWS_AS(run_natural_gradient(ctx, OptimizerConfig{}), Error);
}
