#pragma once

#include <span>
#include <vector>

#include "core/common.hpp"

namespace destim {

/// Bayesian cost C(U, theta): squared L2 norm or L1 norm of U - theta.
/// The enum is closed; the MAP indicator cost has no usable gradient and is
/// rejected at configuration level.
enum class CostKind { squared_error, absolute_error };

double cost(CostKind kind, std::span<const double> u, std::span<const double> theta);

/// Gradient of C with respect to U. Absolute-error ties contribute 0.
void cost_grad_u(CostKind kind, std::span<const double> u, std::span<const double> theta,
                 std::span<double> out);
std::vector<double> cost_grad_u(CostKind kind, std::span<const double> u,
                                std::span<const double> theta);

}  // namespace destim
