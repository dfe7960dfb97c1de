#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "core/maxcorr.hpp"
#include "support/oracles.hpp"

using namespace destim;

namespace {

/// Independently coded evaluator of the three double sums and their ratio.
/// Deliberately re-derives the transforms instead of calling the library.
double naive_objective(const Matrix& x, const Matrix& z1, const Matrix& z2, TransformKind kind,
                       double h, std::span<const double> theta) {
  auto transform_row = [&](std::span<const double> z) {
    std::vector<double> out;
    if (kind == TransformKind::translation) {
      for (std::size_t i = 0; i < z.size(); ++i) out.push_back(z[i] + theta[i]);
    } else if (kind == TransformKind::elementwise_scale) {
      for (std::size_t i = 0; i < z.size(); ++i) out.push_back(theta[i] * z[i]);
    } else {
      std::size_t rows = theta.size() / z.size();
      for (std::size_t r = 0; r < rows; ++r) {
        double acc = 0.0;
        for (std::size_t i = 0; i < z.size(); ++i) acc += theta[r * z.size() + i] * z[i];
        out.push_back(acc);
      }
    }
    return out;
  };
  auto k = [&](const std::vector<double>& a, const std::vector<double>& b) {
    double d2 = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) d2 += (a[i] - b[i]) * (a[i] - b[i]);
    return std::exp(-d2 / h);
  };

  double n1 = 0.0, n2 = 0.0, d = 0.0;
  for (std::size_t i = 0; i < x.rows(); ++i) {
    std::vector<double> xi(x.row(i).begin(), x.row(i).end());
    for (std::size_t j = 0; j < z1.rows(); ++j) n1 += k(xi, transform_row(z1.row(j)));
    for (std::size_t j = 0; j < z2.rows(); ++j) n2 += k(xi, transform_row(z2.row(j)));
  }
  for (std::size_t i = 0; i < z1.rows(); ++i) {
    std::vector<double> t1 = transform_row(z1.row(i));
    for (std::size_t j = 0; j < z2.rows(); ++j) d += k(t1, transform_row(z2.row(j)));
  }
  return n1 * n2 / d;
}

MaxCorrProblem random_scalar_problem(Rng& rng, std::size_t n, std::size_t m1, std::size_t m2) {
  MaxCorrProblem p;
  p.x_data = Matrix(n, 1);
  p.z_split_1 = Matrix(m1, 1);
  p.z_split_2 = Matrix(m2, 1);
  for (std::size_t i = 0; i < n; ++i) p.x_data.at(i, 0) = rng.uniform(-2.0, 2.0);
  for (std::size_t i = 0; i < m1; ++i) p.z_split_1.at(i, 0) = rng.uniform(-2.0, 2.0);
  for (std::size_t i = 0; i < m2; ++i) p.z_split_2.at(i, 0) = rng.uniform(-2.0, 2.0);
  p.transform = {TransformKind::translation, 1, 1};
  return p;
}

MaxCorrProblem degenerate_point_problem() {
  MaxCorrProblem p;
  p.x_data = Matrix(1, 1);
  p.z_split_1 = Matrix(1, 1);
  p.z_split_2 = Matrix(1, 1);
  p.transform = {TransformKind::translation, 1, 1};
  return p;  // all samples at zero
}

}  // namespace

TEST_SUITE("maxcorr") {

TEST_CASE("kernel_eval") {
  KernelConfig cfg;
  CHECK(kernel_eval(cfg, std::vector<double>{0.5, 1.0}, std::vector<double>{0.5, 1.0}) == 1.0);
  CHECK(kernel_eval(cfg, std::vector<double>{0.0}, std::vector<double>{1.0}) ==
        doctest::Approx(std::exp(-1.0)).epsilon(1e-15));
  Rng rng(3);
  for (int rep = 0; rep < 20; ++rep) {
    std::vector<double> a{rng.uniform(-3, 3), rng.uniform(-3, 3)};
    std::vector<double> b{rng.uniform(-3, 3), rng.uniform(-3, 3)};
    CHECK(kernel_eval(cfg, a, b) == kernel_eval(cfg, b, a));
    CHECK(kernel_eval(cfg, a, b) > 0.0);
    CHECK(kernel_eval(cfg, a, b) <= 1.0);
  }
  CHECK_THROWS_AS(kernel_eval(cfg, std::vector<double>{1.0}, std::vector<double>{1.0, 2.0}),
                  Error);
}

TEST_CASE("split_latent") {
  Matrix z(100, 1);
  for (std::size_t i = 0; i < 100; ++i) z.at(i, 0) = static_cast<double>(i);

  auto [a, b] = split_latent(z, 50, 9);
  CHECK(a.rows() == 50);
  CHECK(b.rows() == 50);

  // Union preserves the multiset.
  std::vector<double> merged(a.data());
  merged.insert(merged.end(), b.data().begin(), b.data().end());
  std::sort(merged.begin(), merged.end());
  CHECK(merged == z.data());

  auto [c, d] = split_latent(z, 99, 9);
  CHECK(c.rows() == 99);
  CHECK(d.rows() == 1);

  auto [e, f] = split_latent(z, 50, 9);
  CHECK(e.data() == a.data());
  CHECK(f.data() == b.data());

  CHECK_THROWS_AS(split_latent(z, 100, 9), Error);
  CHECK_THROWS_AS(split_latent(z, 0, 9), Error);
}

TEST_CASE("objective on the degenerate one-point instance") {
  MaxCorrProblem p = degenerate_point_problem();
  CHECK(objective(p, std::vector<double>{0.0}) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(objective(p, std::vector<double>{1.0}) ==
        doctest::Approx(std::exp(-2.0)).epsilon(1e-12));
}

TEST_CASE("objective matches the naive double-sum oracle") {
  Rng rng(17);
  for (int rep = 0; rep < 40; ++rep) {
    MaxCorrProblem p = random_scalar_problem(rng, 5, 3, 3);
    std::vector<double> theta{rng.uniform(-2.0, 2.0)};
    double expected =
        naive_objective(p.x_data, p.z_split_1, p.z_split_2, p.transform.kind, 1.0, theta);
    CHECK(oracles::rel_err(objective(p, theta), expected, 1e-12) < 1e-12);
  }

  // Vector case through the matrix transform.
  MaxCorrProblem pm;
  Rng rng2(18);
  pm.x_data = Matrix(4, 2);
  pm.z_split_1 = Matrix(3, 2);
  pm.z_split_2 = Matrix(2, 2);
  for (double& v : pm.x_data.data()) v = rng2.uniform(-1, 1);
  for (double& v : pm.z_split_1.data()) v = rng2.uniform(-1, 1);
  for (double& v : pm.z_split_2.data()) v = rng2.uniform(-1, 1);
  pm.transform = {TransformKind::matrix, 2, 2};
  std::vector<double> theta{1.0, 0.2, -0.3, 0.8};
  double expected =
      naive_objective(pm.x_data, pm.z_split_1, pm.z_split_2, TransformKind::matrix, 1.0, theta);
  CHECK(oracles::rel_err(objective(pm, theta), expected, 1e-12) < 1e-12);
}

TEST_CASE("objective is positive and symmetric under split swap") {
  Rng rng(19);
  for (int rep = 0; rep < 20; ++rep) {
    MaxCorrProblem p = random_scalar_problem(rng, 6, 4, 3);
    MaxCorrProblem swapped = p;
    std::swap(swapped.z_split_1, swapped.z_split_2);
    std::vector<double> theta{rng.uniform(-3.0, 3.0)};
    double a = objective(p, theta);
    double b = objective(swapped, theta);
    CHECK(a > 0.0);
    CHECK(oracles::rel_err(a, b, 1e-12) < 1e-12);
  }
}

TEST_CASE("gradient is zero at the symmetric stationary point") {
  MaxCorrProblem p = degenerate_point_problem();
  auto grad = objective_gradient(p, std::vector<double>{0.0});
  CHECK(grad.size() == 1);
  CHECK(grad[0] == doctest::Approx(0.0).epsilon(1e-15));
}

TEST_CASE("gradient matches finite differences") {
  Rng rng(20);
  for (int rep = 0; rep < 40; ++rep) {
    MaxCorrProblem p = random_scalar_problem(rng, 6, 4, 4);
    std::vector<double> theta{rng.uniform(-1.5, 1.5)};
    auto grad = objective_gradient(p, theta);
    auto fd = oracles::fd_gradient(
        [&](std::span<const double> t) { return objective(p, t); }, theta, 1e-6);
    CHECK(oracles::rel_err(grad[0], fd[0], 1e-6) < 1e-5);
  }

  MaxCorrProblem ps;
  Rng rng2(21);
  ps.x_data = Matrix(5, 2);
  ps.z_split_1 = Matrix(4, 2);
  ps.z_split_2 = Matrix(3, 2);
  for (double& v : ps.x_data.data()) v = rng2.uniform(0.5, 2.0);
  for (double& v : ps.z_split_1.data()) v = rng2.uniform(0.5, 2.0);
  for (double& v : ps.z_split_2.data()) v = rng2.uniform(0.5, 2.0);
  ps.transform = {TransformKind::elementwise_scale, 2, 2};
  for (int rep = 0; rep < 20; ++rep) {
    std::vector<double> theta{rng2.uniform(0.5, 2.0), rng2.uniform(0.5, 2.0)};
    auto grad = objective_gradient(ps, theta);
    auto fd = oracles::fd_gradient(
        [&](std::span<const double> t) { return objective(ps, t); }, theta, 1e-6);
    for (std::size_t i = 0; i < grad.size(); ++i)
      CHECK(oracles::rel_err(grad[i], fd[i], 1e-6) < 1e-5);
  }
}

TEST_CASE("translation equivariance on a dense grid") {
  Rng rng(22);
  MaxCorrProblem p = random_scalar_problem(rng, 5, 3, 3);
  const double delta = 0.85;
  MaxCorrProblem shifted = p;
  for (double& v : shifted.x_data.data()) v += delta;

  for (int i = 0; i <= 200; ++i) {
    double theta = -4.0 + 8.0 * i / 200.0;
    double lhs = objective(shifted, std::vector<double>{theta});
    double rhs = objective(p, std::vector<double>{theta - delta});
    CHECK(oracles::rel_err(lhs, rhs, 1e-12) < 1e-10);
  }

  // The same identity holds for gradients.
  for (double theta : {-1.0, 0.2, 1.4}) {
    auto lhs = objective_gradient(shifted, std::vector<double>{theta});
    auto rhs = objective_gradient(p, std::vector<double>{theta - delta});
    CHECK(oracles::rel_err(lhs[0], rhs[0], 1e-9) < 1e-9);
  }
}

TEST_CASE("one-point consistency: the maximizer matches the generating theta") {
  // Translation: x = z + theta*.
  {
    MaxCorrProblem p;
    p.x_data = Matrix(1, 1);
    p.z_split_1 = Matrix(1, 1);
    p.z_split_2 = Matrix(1, 1);
    p.x_data.at(0, 0) = 1.7;
    p.z_split_1.at(0, 0) = 0.5;
    p.z_split_2.at(0, 0) = 0.5;
    p.transform = {TransformKind::translation, 1, 1};
    double best = oracles::grid_zoom_max(
        [&](double t) { return objective(p, std::vector<double>{t}); }, -5.0, 5.0, 401, 1e-7);
    CHECK(std::abs(best - 1.2) < 1e-5);
  }
  // Elementwise scale with positive latent point: x = theta* z.
  {
    MaxCorrProblem p;
    p.x_data = Matrix(1, 1);
    p.z_split_1 = Matrix(1, 1);
    p.z_split_2 = Matrix(1, 1);
    p.x_data.at(0, 0) = 1.5;
    p.z_split_1.at(0, 0) = 0.5;
    p.z_split_2.at(0, 0) = 0.5;
    p.transform = {TransformKind::elementwise_scale, 1, 1};
    double best = oracles::grid_zoom_max(
        [&](double t) { return objective(p, std::vector<double>{t}); }, 0.1, 8.0, 401, 1e-7);
    CHECK(std::abs(best - 3.0) < 1e-5);
  }
}

TEST_CASE("estimate recovers the perfect-match parameter") {
  Rng rng(23);
  MaxCorrProblem p;
  p.z_split_1 = Matrix(20, 1);
  p.z_split_2 = Matrix(20, 1);
  for (std::size_t i = 0; i < 20; ++i) {
    p.z_split_1.at(i, 0) = rng.uniform(-2.0, 2.0);
    p.z_split_2.at(i, 0) = rng.uniform(-2.0, 2.0);
  }
  // Observations are exactly the transformed latent points at theta* = 0.
  p.x_data = Matrix(40, 1);
  for (std::size_t i = 0; i < 20; ++i) {
    p.x_data.at(i, 0) = p.z_split_1.at(i, 0);
    p.x_data.at(20 + i, 0) = p.z_split_2.at(i, 0);
  }
  p.transform = {TransformKind::translation, 1, 1};

  OptimizerConfig cfg = OptimizerConfig::defaults(1);
  EstimateResult res = estimate(p, cfg);
  CHECK(std::abs(res.theta[0]) < 1e-3);
  CHECK(res.value > 0.0);
  CHECK(res.restarts.size() == 1);
  CHECK(res.restarts[0].ok);
}

TEST_CASE("grid-then-refine lands inside the best grid cell") {
  Rng rng(24);
  MaxCorrProblem p = random_scalar_problem(rng, 12, 6, 6);
  OptimizerConfig cfg = OptimizerConfig::defaults(1);
  cfg.init_lo = {-4.0};
  cfg.init_hi = {4.0};
  EstimateResult res = estimate(p, cfg);

  double spacing = 8.0 / 200.0;
  double best_grid = -4.0;
  double best_val = -std::numeric_limits<double>::infinity();
  for (int i = 0; i <= 200; ++i) {
    double t = -4.0 + spacing * i;
    double v = log_objective(p, std::vector<double>{t});
    if (v > best_val) {
      best_val = v;
      best_grid = t;
    }
  }
  CHECK(std::abs(res.theta[0] - best_grid) <= spacing);
  CHECK(log_objective(p, res.theta) >= best_val - 1e-12);
}

TEST_CASE("nelder-mead handles a vector parameter") {
  Rng rng(25);
  MaxCorrProblem p;
  p.z_split_1 = Matrix(25, 2);
  p.z_split_2 = Matrix(25, 2);
  for (double& v : p.z_split_1.data()) v = rng.uniform(0.5, 2.0);
  for (double& v : p.z_split_2.data()) v = rng.uniform(0.5, 2.0);
  std::vector<double> theta_true{1.6, 0.7};
  p.transform = {TransformKind::elementwise_scale, 2, 2};
  p.x_data = Matrix(50, 2);
  for (std::size_t i = 0; i < 25; ++i) {
    for (std::size_t j = 0; j < 2; ++j) {
      p.x_data.at(i, j) = theta_true[j] * p.z_split_1.at(i, j);
      p.x_data.at(25 + i, j) = theta_true[j] * p.z_split_2.at(i, j);
    }
  }
  OptimizerConfig cfg = OptimizerConfig::defaults(2);
  cfg.init_lo = {0.1};
  cfg.init_hi = {4.0};
  cfg.seed = 5;
  EstimateResult res = estimate(p, cfg);
  CHECK(res.restarts.size() == 5);
  CHECK(std::abs(res.theta[0] - theta_true[0]) < 0.05);
  CHECK(std::abs(res.theta[1] - theta_true[1]) < 0.05);
}

TEST_CASE("invalid problems are rejected") {
  MaxCorrProblem p = degenerate_point_problem();
  CHECK_THROWS_AS(objective(p, std::vector<double>{0.0, 1.0}), Error);
  std::vector<double> nan_theta{std::numeric_limits<double>::quiet_NaN()};
  CHECK_THROWS_AS(objective(p, nan_theta), Error);
  MaxCorrProblem empty;
  CHECK_THROWS_AS(objective(empty, std::vector<double>{0.0}), Error);
}

}  // TEST_SUITE
