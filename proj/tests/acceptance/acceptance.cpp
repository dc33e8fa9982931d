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

// Acceptance battery: one PASS/FAIL line per criterion, nonzero exit on any FAIL.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <unistd.h>
#include <vector>

#include "ivakit/cli/commands.hpp"
#include "ivakit/metrics.hpp"
#include "ivakit/objective.hpp"
#include "ivakit/optimizers.hpp"
#include "ivakit/rng.hpp"
#include "ivakit/simgen.hpp"

using namespace ivakit;
namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

struct Outcome {
  bool pass = false;
  std::string detail;
};

double rel_err(const Matrix& a, const Matrix& b) { return (a - b).norm() / std::max({1e-12, a.norm(), b.norm()}); }

Matrix random_spd(CounterRng& rng, int k) {
  const Matrix a = standard_normal_matrix(rng, k, k);
  return a * a.transpose() / k + 0.5 * Matrix::Identity(k, k);
}

// Heavy-tailed dependent SCVs under random mixing.
DatasetCollection heavy_tailed_problem(CounterRng& rng, int p, int k, int n) {
  std::exponential_distribution<double> expo(1.0);
  MatrixList sources(k, Matrix(p, n));
  for (int j = 0; j < p; ++j) {
    const Matrix l = standard_normal_matrix(rng, k, k) + 2.0 * Matrix::Identity(k, k);
    for (int i = 0; i < n; ++i) {
      const Vector z = l * Vector(standard_normal_matrix(rng, k, 1)) * std::sqrt(expo(rng));
      for (int kk = 0; kk < k; ++kk) sources[kk](j, i) = z(kk);
    }
  }
  MatrixList data;
  for (int kk = 0; kk < k; ++kk)
    data.push_back((standard_normal_matrix(rng, p, p) + 2.0 * Matrix::Identity(p, p)) * sources[kk]);
  return DatasetCollection(std::move(data));
}

UnmixingSet random_unmixing(CounterRng& rng, int p, int k) {
  UnmixingSet w;
  for (int kk = 0; kk < k; ++kk) w.matrices.push_back(standard_normal_matrix(rng, p, p) + 2.0 * Matrix::Identity(p, p));
  return w;
}

struct SimProblem {
  DatasetCollection white;
  WhiteningTransform transform;
  MixingSet mixing;
};

SimProblem simulated(ScvFamily family, int p, int k, int n, std::uint64_t seed) {
  ScvSpec spec;
  spec.p = p;
  spec.k = k;
  spec.n = n;
  spec.family = family;
  spec.covariance_style = CovarianceStyle::kAr1;
  spec.ar1_phi = 0.8;
  spec.seed = seed;
  const GeneratedSources g = gen_scv_sources(spec);
  MixingSet m = gen_mixing(p, k, 20.0, cli::mixing_seed(seed));
  auto [white, tr] = center_and_whiten(mix(g.sources, m));
  return {std::move(white), std::move(tr), std::move(m)};
}

double jisi_of(const UnmixingSet& w, const SimProblem& prob) {
  return joint_isi(gain_matrices(compose_with_whitening(w, prob.transform), prob.mixing));
}

Outcome gradient_oracle() {
  const auto t0 = Clock::now();
  CounterRng rng(101);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const int p = 3, k = 3, n = 500;
  const DatasetCollection data = heavy_tailed_problem(rng, p, k, n);
  const Vector mu = Vector::Zero(k);
  std::vector<DensityModel> battery = {DensityModel::gaussian(mu, random_spd(rng, k)),
                                       DensityModel::laplace(mu, random_spd(rng, k)),
                                       DensityModel::student_t(mu, random_spd(rng, k), 3.0),
                                       DensityModel::student_t(mu, random_spd(rng, k), 7.0)};
  for (int i = 0; i < 3; ++i)
    battery.push_back(DensityModel::kotz(mu, random_spd(rng, k), {0.5 + u(rng), 0.8 + u(rng), 0.3 + u(rng)}));
  for (int i = 0; i < 3; ++i)
    battery.push_back(DensityModel::mggd(mu, random_spd(rng, k), {0.5 + 2 * u(rng), 0.4 + u(rng)}));
  battery.push_back(DensityModel::mixed(0.5, DensityModel::student_t(mu, random_spd(rng, k), 5.0),
                                        DensityModel::laplace(mu, random_spd(rng, k))));
  battery.push_back(DensityModel::super_gaussian(k));

  double worst = 0.0;
  for (const DensityModel& m : battery) {
    const CostContext ctx{data, std::vector<DensityModel>(p, m)};
    const UnmixingSet w = random_unmixing(rng, p, k);
    const MatrixList grads = iva_gradients(ctx, w);
    for (int kk = 0; kk < k; ++kk) {
      Matrix fd(p, p);
      for (int a = 0; a < p; ++a)
        for (int b = 0; b < p; ++b) {
          const double h = 1e-5;
          UnmixingSet wp = w, wm = w;
          wp.matrices[kk](a, b) += h;
          wm.matrices[kk](a, b) -= h;
          fd(a, b) = (iva_cost(ctx, wp) - iva_cost(ctx, wm)) / (2 * h);
        }
      worst = std::max(worst, rel_err(grads[kk], fd));
    }
  }
  const double secs = seconds_since(t0);
  return {worst <= 1e-5 && secs <= 60.0,
          std::to_string(battery.size()) + " models, max rel err " + fmt("%.2e", worst) + " (<= 1e-5), " +
              fmt("%.2f", secs) + " s (<= 60)"};
}

Outcome score_special_cases() {
  CounterRng rng(202);
  const int k = 3;
  const Vector mu = standard_normal_matrix(rng, k, 1).col(0);
  const Matrix sigma = random_spd(rng, k);
  const DensityModel gauss = DensityModel::gaussian(mu, sigma), lap = DensityModel::laplace(mu, sigma);
  const std::vector<std::pair<DensityModel, const DensityModel*>> pairs = {
      {DensityModel::kotz(mu, sigma, {1.0, 1.0, 0.5}), &gauss},
      {DensityModel::kotz(mu, sigma, {0.5, 1.0, 1.0}), &lap},
      {DensityModel::mggd(mu, sigma, {2.0, 1.0}), &gauss},
      {DensityModel::mggd(mu, sigma, {1.0, 0.5}), &lap}};
  double worst = 0.0;
  for (const auto& [special, reference] : pairs)
    for (int i = 0; i < 100; ++i) {
      const Vector y = mu + 1.5 * standard_normal_matrix(rng, k, 1).col(0);
      worst = std::max(worst, (special.score(y) - reference->score(y)).cwiseAbs().maxCoeff());
    }
  return {worst <= 1e-10, "4 identities x 100 points, max score diff " + fmt("%.2e", worst) + " (<= 1e-10)"};
}

Outcome hessian_positivity() {
  CounterRng rng(303);
  double min_eig = INFINITY;
  for (int draw = 0; draw < 50; ++draw) {
    const DatasetCollection data = heavy_tailed_problem(rng, 3, 3, 300);
    std::vector<DensityModel> models;
    for (int j = 0; j < 3; ++j) models.push_back(DensityModel::gaussian(Vector::Zero(3), random_spd(rng, 3)));
    const CostContext ctx{data, models};
    const UnmixingSet w = random_unmixing(rng, 3, 3);
    for (Eigen::Index j = 0; j < 3; ++j) {
      Eigen::SelfAdjointEigenSolver<Matrix> eig(row_hessian(ctx, w, j));
      min_eig = std::min(min_eig, eig.eigenvalues().minCoeff());
    }
  }
  return {min_eig > 0.0, "50 draws x 3 rows, min eigenvalue " + fmt("%.3e", min_eig) + " (> 0)"};
}

Outcome decoupling_identity() {
  CounterRng rng(404);
  double worst = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const int p = 2 + trial % 5;
    const Matrix w = standard_normal_matrix(rng, p, p);
    const double det = std::abs(w.determinant());
    for (int j = 0; j < p; ++j) {
      const Vector h = decoupling_vector(w, j);
      Matrix reduced(p - 1, p);
      for (int i = 0, r = 0; i < p; ++i)
        if (i != j) reduced.row(r++) = w.row(i);
      const double rhs = std::abs(h.dot(w.row(j).transpose())) * std::sqrt((reduced * reduced.transpose()).determinant());
      worst = std::max(worst, std::abs(det - rhs) / std::max(1.0, det));
    }
  }
  return {worst <= 1e-9, "100 matrices, p in 2..6, max deviation " + fmt("%.2e", worst) + " (<= 1e-9)"};
}

Outcome recovery_benchmark() {
  int good = 0;
  std::vector<double> times, jisis;
  for (std::uint64_t s = 0; s < 20; ++s) {
    const std::uint64_t seed = derive_seed(5000, s);
    const auto t0 = Clock::now();
    const SimProblem prob = simulated(ScvFamily::kGaussian, 4, 5, 10000, seed);
    OptimizerConfig cfg;
    cfg.seed = seed;
    const OptimizerResult r = run_iva_g(prob.white, cfg, IvaGVariant::kNewton);
    times.push_back(seconds_since(t0));
    const double j = jisi_of(r.unmixing, prob);
    jisis.push_back(j);
    if (j <= 0.05) ++good;
  }
  const double median_time = cli::quantile(times, 0.5);
  return {good >= 18 && median_time <= 10.0,
          std::to_string(good) + "/20 seeds with jISI <= 0.05 (>= 18), median jISI " +
              fmt("%.4f", cli::quantile(jisis, 0.5)) + ", median time " + fmt("%.2f", median_time) + " s (<= 10)"};
}

Outcome auxiva_monotonicity() {
  double worst_rise = -INFINITY;
  std::size_t iterations = 0;
  for (std::uint64_t s = 0; s < 20; ++s) {
    const std::uint64_t seed = derive_seed(6000, s);
    const SimProblem prob = simulated(ScvFamily::kLaplace, 3, 3, 10000, seed);
    const CostContext ctx{prob.white, std::vector<DensityModel>(3, DensityModel::super_gaussian(3))};
    OptimizerConfig cfg;
    cfg.seed = seed;
    const OptimizerResult r = run_auxiva(ctx, cfg);
    const auto& t = r.report.cost_trace;
    for (std::size_t i = 1; i < t.size(); ++i) worst_rise = std::max(worst_rise, t[i] - t[i - 1]);
    iterations += t.size() - 1;
  }
  return {worst_rise <= 1e-9, std::to_string(iterations) + " iterations over 20 seeds, largest cost change " +
                                  fmt("%.2e", worst_rise) + " (<= 1e-9)"};
}

Outcome fastiva_criterion() {
  double worst_orth = 0.0;
  int good = 0;
  for (std::uint64_t s = 0; s < 20; ++s) {
    const std::uint64_t seed = derive_seed(7000, s);
    const SimProblem prob = simulated(ScvFamily::kLaplace, 3, 3, 10000, seed);
    const CostContext ctx{prob.white, std::vector<DensityModel>(3, DensityModel::laplace(3))};
    OptimizerConfig cfg;
    cfg.seed = seed;
    cfg.observer = [&](const IterationInfo& info) {
      for (const Matrix& m : info.unmixing.matrices)
        worst_orth = std::max(worst_orth, (m * m.transpose() - Matrix::Identity(3, 3)).norm());
    };
    const OptimizerResult r = run_fastiva(ctx, cfg, FastIvaNonlinearity(NonlinearityChoice::kG2Sqrt));
    if (jisi_of(r.unmixing, prob) <= 0.1) ++good;
  }

  CounterRng rng(7777);
  const int n = 10000;
  std::exponential_distribution<double> expo(1.0);
  std::bernoulli_distribution coin(0.5);
  Matrix src(2, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < 2; ++j) src(j, i) = (coin(rng) ? 1.0 : -1.0) * expo(rng) / std::sqrt(2.0);
  const Matrix a = gen_mixing(2, 1, 20.0, 7777).matrices[0];
  auto [white, tr] = center_and_whiten(DatasetCollection({a * src}));
  OptimizerConfig cfg;
  cfg.seed = 7777;
  const OptimizerResult r = run_fastiva(CostContext{white, std::vector<DensityModel>(2, DensityModel::laplace(1))},
                                        cfg, FastIvaNonlinearity(NonlinearityChoice::kG2Sqrt));
  const double ica = isi(compose_with_whitening(r.unmixing, tr).matrices[0] * a);

  return {worst_orth <= 1e-10 && good >= 16 && ica <= 0.1,
          "max ||WW^T - I||_F " + fmt("%.2e", worst_orth) + " (<= 1e-10), " + std::to_string(good) +
              "/20 seeds with jISI <= 0.1 (>= 16), K = 1 ISI " + fmt("%.4f", ica) + " (<= 0.1)"};
}

Outcome jisi_boundary() {
  CounterRng rng(808);
  std::uniform_real_distribution<double> mag(0.5, 2.0);
  std::bernoulli_distribution coin(0.5);
  auto diag = [&](int p) {
    Vector d(p);
    for (int i = 0; i < p; ++i) d(i) = (coin(rng) ? 1.0 : -1.0) * mag(rng);
    return Matrix(d.asDiagonal());
  };
  double worst_zero = 0.0, worst_one = 0.0, worst_scale = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const int p = 2 + trial % 5, k = 1 + trial % 4;
    std::vector<int> perm(p);
    for (int i = 0; i < p; ++i) perm[i] = i;
    std::shuffle(perm.begin(), perm.end(), rng);
    Matrix pm = Matrix::Zero(p, p);
    for (int i = 0; i < p; ++i) pm(i, perm[i]) = 1.0;
    MatrixList diag_gains, flat_gains, scaled;
    for (int kk = 0; kk < k; ++kk) {
      diag_gains.push_back(diag(p) * pm);
      const double c = mag(rng);
      Matrix flat(p, p);
      for (int i = 0; i < p * p; ++i) flat.data()[i] = coin(rng) ? c : -c;
      flat_gains.push_back(flat);
      scaled.push_back(diag(p) * diag_gains.back() * diag(p));
    }
    worst_zero = std::max(worst_zero, joint_isi(diag_gains));
    worst_one = std::max(worst_one, std::abs(joint_isi(flat_gains) - 1.0));
    worst_scale = std::max(worst_scale, std::abs(joint_isi(scaled) - joint_isi(diag_gains)));
  }
  return {worst_zero == 0.0 && worst_one <= 1e-12 && worst_scale <= 1e-12,
          "100 gain sets: max jISI of permuted diagonals " + fmt("%.1e", worst_zero) + " (= 0), max |jISI - 1| " +
              fmt("%.1e", worst_one) + " (<= 1e-12), scaling change " + fmt("%.1e", worst_scale) + " (<= 1e-12)"};
}

double kendall_tau(const Vector& a, const Vector& b) {
  double s = 0.0;
  for (Eigen::Index i = 0; i < a.size(); ++i)
    for (Eigen::Index j = i + 1; j < a.size(); ++j) {
      const double d = (a(i) - a(j)) * (b(i) - b(j));
      s += d > 0 ? 1.0 : (d < 0 ? -1.0 : 0.0);
    }
  return s / (0.5 * a.size() * (a.size() - 1));
}

Outcome genvar_equivalence() {
  const SimProblem prob = simulated(ScvFamily::kGaussian, 3, 3, 5000, 909);
  CounterRng rng(909);
  Vector cost(50), genvar(50);
  for (int t = 0; t < 50; ++t) {
    UnmixingSet w;
    for (int k = 0; k < 3; ++k) w.matrices.push_back(random_orthogonal(rng, 3));
    cost(t) = iva_g_cost(w, prob.white);
    double prod = 1.0;
    for (const Vector& lam : scv_covariance_eigenvalues(w, prob.white)) prod *= lam.prod();
    genvar(t) = prod;
  }
  const double tau = kendall_tau(cost, genvar);
  return {tau == 1.0, "50 orthogonal unmixing sets, Kendall tau " + fmt("%.4f", tau) + " (= 1)"};
}

Outcome identifiability() {
  CounterRng rng(1010);
  int flagged = 0, flipped = 0, pairs = 0, perturbations = 0;
  for (int k = 1; k <= 5; ++k) {
    const Matrix r_l = random_correlation(rng, k);
    for (int pattern = 0; pattern < (1 << (k - 1)); ++pattern) {
      Vector d = Vector::Ones(k);
      for (int b = 0; b < k - 1; ++b)
        if (pattern & (1 << b)) d(b + 1) = -1.0;
      const Matrix r_j = d.asDiagonal() * r_l * d.asDiagonal();
      ++pairs;
      if (!check_identifiability_gaussian({r_l, r_j}, 1e-6).identifiable) ++flagged;
      for (int a = 0; a < k; ++a)
        for (int b = a; b < k; ++b) {
          Matrix pert = r_j;
          pert(a, b) += 1e-3;
          if (a != b) pert(b, a) += 1e-3;
          ++perturbations;
          if (check_identifiability_gaussian({r_l, pert}, 1e-6).identifiable) ++flipped;
        }
    }
  }
  return {flagged == pairs && flipped == perturbations,
          std::to_string(flagged) + "/" + std::to_string(pairs) + " sign-flipped pairs flagged, " +
              std::to_string(flipped) + "/" + std::to_string(perturbations) + " perturbations flip the verdict"};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

Outcome end_to_end_determinism(const std::string& tool) {
  if (tool.empty()) return {false, "no ivakit executable given"};
  const fs::path root = fs::temp_directory_path() / ("ivakit_acceptance_" + std::to_string(::getpid()));
  fs::remove_all(root);
  fs::create_directories(root);
  {
    std::ofstream cfg(root / "config.toml");
    cfg << "seed = 424242\nreplicates = 3\n\n[problem]\np = 3\nk = 4\nn = 3000\nfamily = \"laplace\"\n\n"
           "[algorithm]\nname = \"newton\"\n\n[density]\nfamily = \"laplace\"\n";
  }
  std::vector<std::string> reports;
  for (const char* run : {"a", "b"}) {
    const fs::path d = root / run;
    const std::string q = "\"" + tool + "\"";
    const std::string cfg = "\"" + (root / "config.toml").string() + "\"";
    const std::string cmds[] = {
        q + " simulate --config " + cfg + " --out \"" + (d / "truth").string() + "\"",
        q + " separate --config " + cfg + " --data \"" + (d / "truth").string() + "\" --out \"" + (d / "est").string() + "\"",
        q + " evaluate --est \"" + (d / "est").string() + "\" --truth \"" + (d / "truth").string() + "\" --out \"" +
            (d / "eval").string() + "\""};
    for (const std::string& c : cmds)
      if (std::system((c + " > /dev/null").c_str()) != 0) {
        fs::remove_all(root);
        return {false, "command failed: " + c};
      }
    reports.push_back(slurp(d / "eval" / "report.json"));
  }
  const bool same = !reports[0].empty() && reports[0] == reports[1];
  const bool blind_same = slurp(root / "a" / "est" / "report.json") == slurp(root / "b" / "est" / "report.json");
  fs::remove_all(root);
  return {same && blind_same, std::string("evaluate report.json ") + (same ? "identical" : "differs") +
                                  " (" + std::to_string(reports[0].size()) + " bytes), separate report.json " +
                                  (blind_same ? "identical" : "differs")};
}

Outcome negentropy() {
  CounterRng rng(1212);
  const double j_normal = negentropy_moment_approx(standardize(standard_normal_matrix(rng, 100000, 1)));
  Vector balanced(2);
  balanced << -1.0, 1.0;
  const double analytic = negentropy_moment_approx(balanced);
  std::bernoulli_distribution coin(0.5);
  Vector sample(100000);
  for (Eigen::Index i = 0; i < sample.size(); ++i) sample(i) = coin(rng) ? 1.0 : -1.0;
  const double empirical = negentropy_moment_approx(standardize(sample));
  const bool ok = std::abs(j_normal) <= 0.01 && analytic == 1.0 / 12.0 && std::abs(empirical - 1.0 / 12.0) <= 1e-3;
  return {ok, "normal |J| " + fmt("%.2e", std::abs(j_normal)) + " (<= 0.01), two-point exact " +
                  fmt("%.17g", analytic) + " (= 1/12), sampled error " + fmt("%.2e", std::abs(empirical - 1.0 / 12.0)) +
                  " (<= 1e-3)"};
}

}  // namespace

int main(int argc, char** argv) {
  const std::string tool = argc > 1 ? argv[1] : "";
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"gradient oracle", gradient_oracle},
      {"score special cases", score_special_cases},
      {"Gaussian row Hessian positivity", hessian_positivity},
      {"decoupling identity", decoupling_identity},
      {"IVA-G recovery benchmark", recovery_benchmark},
      {"AuxIVA monotonicity", auxiva_monotonicity},
      {"FastIVA orthogonality and recovery", fastiva_criterion},
      {"jISI boundary exactness", jisi_boundary},
      {"GENVAR equivalence", genvar_equivalence},
      {"Gaussian identifiability checker", identifiability},
      {"end-to-end determinism", [&] { return end_to_end_determinism(tool); }},
      {"negentropy approximations", negentropy},
  };
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const auto t0 = Clock::now();
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    if (!o.pass) ++failures;
    std::cout << "criterion " << (i + 1) << ": " << (o.pass ? "PASS" : "FAIL") << "  " << criteria[i].first << ": "
              << o.detail << " [" << fmt("%.1f", seconds_since(t0)) << " s]" << std::endl;
  }
  std::cout << (failures == 0 ? "all criteria passed" : std::to_string(failures) + " criteria failed") << std::endl;
  return failures == 0 ? 0 : 1;
}
