#include <doctest.h>

#include <cmath>
#include <vector>

#include "core/costs.hpp"
#include "core/rng.hpp"
#include "support/oracles.hpp"

using namespace destim;

TEST_SUITE("costs") {

TEST_CASE("definitions") {
  CHECK(cost(CostKind::squared_error, std::vector<double>{1, 1}, std::vector<double>{1, 1}) == 0.0);
  CHECK(cost(CostKind::squared_error, std::vector<double>{2, 0}, std::vector<double>{0, 0}) == 4.0);
  CHECK(cost(CostKind::absolute_error, std::vector<double>{2, -1}, std::vector<double>{0, 0}) ==
        3.0);
}

TEST_CASE("gradients") {
  CHECK(cost_grad_u(CostKind::squared_error, std::vector<double>{3}, std::vector<double>{1}) ==
        std::vector<double>{4});
  CHECK(cost_grad_u(CostKind::absolute_error, std::vector<double>{3}, std::vector<double>{1}) ==
        std::vector<double>{1});
  CHECK(cost_grad_u(CostKind::absolute_error, std::vector<double>{1}, std::vector<double>{1}) ==
        std::vector<double>{0});
}

TEST_CASE("length mismatch rejected") {
  CHECK_THROWS_AS(cost(CostKind::squared_error, std::vector<double>{1}, std::vector<double>{1, 2}),
                  Error);
}

TEST_CASE("gradient matches finite differences away from kinks") {
  Rng rng(99);
  for (CostKind kind : {CostKind::squared_error, CostKind::absolute_error}) {
    for (int rep = 0; rep < 60; ++rep) {
      std::vector<double> u(3), theta(3);
      for (double& v : u) v = rng.uniform(-4.0, 4.0);
      for (double& v : theta) v = rng.uniform(-4.0, 4.0);
      bool near_kink = false;
      for (std::size_t i = 0; i < u.size(); ++i)
        near_kink = near_kink || std::abs(u[i] - theta[i]) < 1e-3;
      if (kind == CostKind::absolute_error && near_kink) continue;

      auto grad = cost_grad_u(kind, u, theta);
      auto fd = oracles::fd_gradient(
          [&](std::span<const double> point) { return cost(kind, point, theta); }, u, 1e-6);
      for (std::size_t i = 0; i < u.size(); ++i)
        CHECK(oracles::rel_err(grad[i], fd[i], 1e-3) < 1e-4);
    }
  }
}

TEST_CASE("nonnegative with equality only at u == theta") {
  Rng rng(100);
  for (int rep = 0; rep < 50; ++rep) {
    std::vector<double> u(4), theta(4);
    for (double& v : u) v = rng.uniform(-3.0, 3.0);
    theta = u;
    CHECK(cost(CostKind::squared_error, u, theta) == 0.0);
    CHECK(cost(CostKind::absolute_error, u, theta) == 0.0);
    theta[rng.index(4)] += 0.5;
    CHECK(cost(CostKind::squared_error, u, theta) > 0.0);
    CHECK(cost(CostKind::absolute_error, u, theta) > 0.0);
  }
}

}  // TEST_SUITE
