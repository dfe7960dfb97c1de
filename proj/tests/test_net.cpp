#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <vector>

#include "core/distributions.hpp"
#include "core/net.hpp"
#include "support/oracles.hpp"

using namespace destim;

namespace {

PairedDataset linear_gaussian_toy(std::size_t pairs, std::uint64_t seed) {
  // theta ~ N(0,1), X = theta + N(0,1); posterior mean is X/2, MMSE 1/2.
  Rng rng(seed);
  PairedDataset data{Matrix(pairs, 1), Matrix(pairs, 1)};
  for (std::size_t i = 0; i < pairs; ++i) {
    double theta = rng.normal();
    data.theta.at(i, 0) = theta;
    data.x.at(i, 0) = theta + rng.normal();
  }
  return data;
}

}  // namespace

TEST_SUITE("net") {

TEST_CASE("forward basics") {
  NeuralEstimator zero({2, 3, 2}, Activation::tanh);
  CHECK(zero.forward(std::vector<double>{1.0, -2.0}) == std::vector<double>{0.0, 0.0});

  NeuralEstimator linear({1, 1}, Activation::tanh);
  linear.params()[0] = 0.5;  // weight
  linear.params()[1] = 0.0;  // bias
  CHECK(linear.forward(std::vector<double>{2.0}) == std::vector<double>{1.0});

  NeuralEstimator net = NeuralEstimator::initialized({3, 8, 2}, Activation::relu, 42);
  auto a = net.forward(std::vector<double>{0.4, -1.0, 2.0});
  auto b = net.forward(std::vector<double>{0.4, -1.0, 2.0});
  CHECK(a == b);
  CHECK_THROWS_AS(net.forward(std::vector<double>{1.0}), Error);
}

TEST_CASE("parameter count matches the layer layout") {
  NeuralEstimator net({2, 5, 3}, Activation::tanh);
  CHECK(net.param_count() == (2 + 1) * 5 + (5 + 1) * 3);
}

TEST_CASE("grad_alpha hand-checked scalar case") {
  NeuralEstimator net({1, 1}, Activation::tanh);
  net.params()[0] = 1.0;
  net.params()[1] = 0.0;
  auto grad = grad_alpha(net, CostKind::squared_error, std::vector<double>{1.0},
                         std::vector<double>{0.0});
  CHECK(grad == std::vector<double>{2.0, 2.0});
}

TEST_CASE("grad_alpha vanishes at a perfect fit") {
  NeuralEstimator net = NeuralEstimator::initialized({2, 6, 2}, Activation::tanh, 11);
  std::vector<double> x{0.3, -0.8};
  auto theta = net.forward(x);
  auto grad = grad_alpha(net, CostKind::squared_error, x, theta);
  for (double g : grad) CHECK(g == 0.0);
}

TEST_CASE("backprop matches finite differences") {
  for (Activation act : {Activation::tanh, Activation::relu}) {
    Rng rng(act == Activation::tanh ? 314 : 315);
    NeuralEstimator net({2, 5, 4, 3, 2}, act);
    // Randomize every parameter including biases: zero biases would park
    // ReLU preactivations exactly on the kink, where the subgradient
    // convention and finite differences legitimately disagree.
    for (double& p : net.params()) p = rng.uniform(-0.7, 0.7);
    for (CostKind kind : {CostKind::squared_error, CostKind::absolute_error}) {
      int checked = 0;
      while (checked < 50) {
        std::vector<double> x{rng.uniform(-2.0, 2.0), rng.uniform(-2.0, 2.0)};
        std::vector<double> theta{rng.uniform(-2.0, 2.0), rng.uniform(-2.0, 2.0)};
        auto u = net.forward(x);
        bool near_kink = false;
        for (std::size_t i = 0; i < u.size(); ++i)
          near_kink = near_kink || std::abs(u[i] - theta[i]) < 1e-4;
        if (kind == CostKind::absolute_error && near_kink) continue;

        auto grad = grad_alpha(net, kind, x, theta);
        std::vector<double> params(net.params().begin(), net.params().end());
        auto fd = oracles::fd_gradient(
            [&](std::span<const double> p) {
              NeuralEstimator probe(net.layer_sizes(), net.activation());
              std::copy(p.begin(), p.end(), probe.params().begin());
              return cost(kind, probe.forward(x), theta);
            },
            params, 1e-6);
        for (std::size_t i = 0; i < grad.size(); ++i)
          CHECK(oracles::rel_err(grad[i], fd[i], 1e-2) < 1e-4);
        ++checked;
      }
    }
  }
}

TEST_CASE("sgd_step") {
  NeuralEstimator net({1, 1}, Activation::tanh);
  net.params()[0] = 1.0;
  net.params()[1] = 0.0;

  // Zero learning rate leaves parameters untouched.
  sgd_step(net, 0.0, CostKind::squared_error, std::vector<double>{1.0}, std::vector<double>{0.0});
  CHECK(net.params()[0] == 1.0);
  CHECK(net.params()[1] == 0.0);

  // Zero gradient (perfect fit) leaves parameters untouched.
  sgd_step(net, 0.5, CostKind::squared_error, std::vector<double>{1.0}, std::vector<double>{1.0});
  CHECK(net.params()[0] == 1.0);

  // Hand-computed update.
  sgd_step(net, 0.1, CostKind::squared_error, std::vector<double>{1.0}, std::vector<double>{0.0});
  CHECK(net.params()[0] == doctest::Approx(0.8).epsilon(1e-15));
  CHECK(net.params()[1] == doctest::Approx(-0.2).epsilon(1e-15));
}

TEST_CASE("train leaves a perfectly fit net untouched") {
  NeuralEstimator net = NeuralEstimator::initialized({1, 4, 1}, Activation::tanh, 5);
  PairedDataset data{Matrix(16, 1), Matrix(16, 1)};
  for (std::size_t i = 0; i < 16; ++i) {
    data.x.at(i, 0) = 0.1 * static_cast<double>(i) - 0.8;
    data.theta.at(i, 0) = net.forward(data.x.row(i))[0];
  }
  std::vector<double> before(net.params().begin(), net.params().end());
  TrainConfig cfg;
  cfg.batch_mode = BatchMode::full_gradient;
  cfg.max_epochs = 5;
  TrainResult res = train(net, cfg, data);
  CHECK(res.loss_trace.front() == 0.0);
  CHECK(res.final_loss == 0.0);
  CHECK(std::vector<double>(net.params().begin(), net.params().end()) == before);
}

TEST_CASE("full-gradient training reaches the least-squares solution") {
  Rng rng(77);
  const std::size_t n = 200;
  PairedDataset data{Matrix(n, 1), Matrix(n, 1)};
  for (std::size_t i = 0; i < n; ++i) {
    double x = rng.uniform(-1.0, 1.0);
    data.x.at(i, 0) = x;
    data.theta.at(i, 0) = 0.7 * x - 0.3 + 0.05 * rng.normal();
  }
  // Normal-equations oracle for the affine fit.
  double sx = 0, sxx = 0, sy = 0, sxy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    double x = data.x.at(i, 0), y = data.theta.at(i, 0);
    sx += x;
    sxx += x * x;
    sy += y;
    sxy += x * y;
  }
  double denom = static_cast<double>(n) * sxx - sx * sx;
  double w_star = (static_cast<double>(n) * sxy - sx * sy) / denom;
  double b_star = (sy - w_star * sx) / static_cast<double>(n);

  NeuralEstimator net({1, 1}, Activation::tanh);
  TrainConfig cfg;
  cfg.batch_mode = BatchMode::full_gradient;
  cfg.learning_rate = 0.3;
  cfg.max_epochs = 5000;
  cfg.early_stop_tolerance = 1e-15;
  train(net, cfg, data);
  CHECK(std::abs(net.params()[0] - w_star) < 1e-4);
  CHECK(std::abs(net.params()[1] - b_star) < 1e-4);
}

TEST_CASE("full-gradient loss is monotone below the safe step") {
  Rng rng(78);
  const std::size_t n = 100;
  PairedDataset data{Matrix(n, 1), Matrix(n, 1)};
  double sx = 0, sxx = 0;
  for (std::size_t i = 0; i < n; ++i) {
    double x = rng.uniform(-2.0, 2.0);
    data.x.at(i, 0) = x;
    data.theta.at(i, 0) = rng.uniform(-1.0, 1.0);
    sx += x;
    sxx += x * x;
  }
  // Hessian of the epoch loss for the affine model is (2/n) [[sxx, sx], [sx, n]].
  double a = 2.0 * sxx / n, b = 2.0 * sx / n, c = 2.0;
  double tr = a + c, det = a * c - b * b;
  double lambda_max = 0.5 * tr + std::sqrt(0.25 * tr * tr - det);

  NeuralEstimator net = NeuralEstimator::initialized({1, 1}, Activation::tanh, 9);
  TrainConfig cfg;
  cfg.batch_mode = BatchMode::full_gradient;
  cfg.learning_rate = 1.8 / lambda_max;
  cfg.max_epochs = 200;
  cfg.early_stop_tolerance = 0.0;
  TrainResult res = train(net, cfg, data);
  for (std::size_t i = 1; i < res.loss_trace.size(); ++i)
    CHECK(res.loss_trace[i] <= res.loss_trace[i - 1] + 1e-12);
}

TEST_CASE("training is reproducible for a fixed seed") {
  PairedDataset data = linear_gaussian_toy(500, 123);
  TrainConfig cfg;
  cfg.learning_rate = 0.02;
  cfg.max_epochs = 10;
  cfg.seed = 99;

  NeuralEstimator a = NeuralEstimator::initialized({1, 8, 1}, Activation::tanh, 7);
  NeuralEstimator b = NeuralEstimator::initialized({1, 8, 1}, Activation::tanh, 7);
  train(a, cfg, data);
  train(b, cfg, data);
  CHECK(std::vector<double>(a.params().begin(), a.params().end()) ==
        std::vector<double>(b.params().begin(), b.params().end()));
}

TEST_CASE("divergence is detected and reported") {
  PairedDataset data = linear_gaussian_toy(200, 321);
  NeuralEstimator net = NeuralEstimator::initialized({1, 8, 1}, Activation::tanh, 3);
  TrainConfig cfg;
  cfg.batch_mode = BatchMode::full_gradient;
  cfg.learning_rate = 50.0;
  cfg.max_epochs = 50;
  try {
    train(net, cfg, data);
    FAIL("expected divergence");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::diverged);
  }
}

TEST_CASE("restart selection survives diverging runs") {
  PairedDataset data = linear_gaussian_toy(500, 11);
  TrainConfig cfg;
  cfg.learning_rate = 0.02;
  cfg.max_epochs = 15;
  cfg.seed = 4;
  TrainResult best;
  NeuralEstimator net = train_with_restarts({1, 8, 1}, Activation::tanh, cfg, data, 3, &best);
  CHECK(best.final_loss < 1.0);
  CHECK(net.forward(std::vector<double>{0.0}).size() == 1);
}

TEST_CASE("model save/load round-trips exactly") {
  namespace fs = std::filesystem;
  NeuralEstimator net = NeuralEstimator::initialized({2, 7, 3}, Activation::relu, 1234);
  fs::path path = fs::temp_directory_path() / "destim_model_roundtrip.json";
  save_model(net, path.string());
  NeuralEstimator loaded = load_model(path.string());
  fs::remove(path);

  CHECK(loaded.layer_sizes() == net.layer_sizes());
  CHECK(loaded.activation() == net.activation());
  CHECK(std::vector<double>(loaded.params().begin(), loaded.params().end()) ==
        std::vector<double>(net.params().begin(), net.params().end()));
  std::vector<double> x{0.5, -1.5};
  CHECK(loaded.forward(x) == net.forward(x));
}

TEST_CASE("quick posterior-mean toy run") {
  PairedDataset data = linear_gaussian_toy(2000, 2024);
  PairedDataset held_out = linear_gaussian_toy(2000, 2025);
  TrainConfig cfg;
  cfg.learning_rate = 0.02;
  cfg.max_epochs = 30;
  cfg.seed = 1;
  NeuralEstimator net = NeuralEstimator::initialized({1, 32, 1}, Activation::tanh, 2);
  train(net, cfg, data);
  double mse = dataset_loss(net, CostKind::squared_error, held_out);
  CHECK(mse <= 0.6);  // analytic optimum is 0.5
}

}  // TEST_SUITE
