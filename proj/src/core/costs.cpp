#include "core/costs.hpp"

#include <cmath>

namespace destim {

double cost(CostKind kind, std::span<const double> u, std::span<const double> theta) {
  require(u.size() == theta.size(), Errc::dimension_mismatch, "cost: length mismatch");
  double acc = 0.0;
  if (kind == CostKind::squared_error) {
    for (std::size_t i = 0; i < u.size(); ++i) {
      double d = u[i] - theta[i];
      acc += d * d;
    }
  } else {
    for (std::size_t i = 0; i < u.size(); ++i) acc += std::abs(u[i] - theta[i]);
  }
  return acc;
}

void cost_grad_u(CostKind kind, std::span<const double> u, std::span<const double> theta,
                 std::span<double> out) {
  require(u.size() == theta.size() && out.size() == u.size(), Errc::dimension_mismatch,
          "cost_grad_u: length mismatch");
  if (kind == CostKind::squared_error) {
    for (std::size_t i = 0; i < u.size(); ++i) out[i] = 2.0 * (u[i] - theta[i]);
  } else {
    for (std::size_t i = 0; i < u.size(); ++i) {
      double d = u[i] - theta[i];
      out[i] = d > 0.0 ? 1.0 : (d < 0.0 ? -1.0 : 0.0);
    }
  }
}

std::vector<double> cost_grad_u(CostKind kind, std::span<const double> u,
                                std::span<const double> theta) {
  std::vector<double> out(u.size());
  cost_grad_u(kind, u, theta, out);
  return out;
}

}  // namespace destim
