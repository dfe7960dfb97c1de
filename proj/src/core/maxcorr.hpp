#pragma once

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "core/common.hpp"
#include "core/rng.hpp"
#include "core/transforms.hpp"

namespace destim {

enum class KernelKind { gaussian };

/// K(x, y) = exp(-||x - y||^2 / h).
struct KernelConfig {
  KernelKind kind = KernelKind::gaussian;
  double bandwidth = 1.0;
};

double kernel_eval(const KernelConfig& cfg, std::span<const double> x, std::span<const double> y);

/// Observed data plus the two independent latent splits; owns the maximal
/// correlation objective N1(theta) N2(theta) / D(theta) built from kernel
/// double sums between the observed set and the transformed latent sets.
struct MaxCorrProblem {
  Matrix x_data;   // n x output_dim
  Matrix z_split_1;  // m1 x input_dim
  Matrix z_split_2;  // m2 x input_dim
  TransformSpec transform;
  KernelConfig kernel;

  void validate() const;
  std::size_t param_dim() const { return destim::param_dim(transform); }
};

/// Seeded shuffle, then disjoint split into the first m1 rows and the rest.
std::pair<Matrix, Matrix> split_latent(const Matrix& z, std::size_t m1, std::uint64_t seed);

/// The raw ratio N1 N2 / D; strictly positive for the Gaussian kernel.
double objective(const MaxCorrProblem& problem, std::span<const double> theta);

/// log N1 + log N2 - log D; same argmax, far better conditioned. Returns
/// -infinity where a sum underflows to zero.
double log_objective(const MaxCorrProblem& problem, std::span<const double> theta);

/// Gradient of the raw ratio, by the quotient rule over the three double sums
/// with the analytic kernel/transform chain rule.
std::vector<double> objective_gradient(const MaxCorrProblem& problem,
                                       std::span<const double> theta);

enum class OptMethod { grid_then_refine, nelder_mead, gradient_ascent };

struct OptimizerConfig {
  OptMethod method = OptMethod::grid_then_refine;
  std::size_t restarts = 1;
  std::size_t max_iters = 500;
  double step_scale = 1.0;  // gradient step / simplex edge
  double tolerance = 1e-6;
  std::uint64_t seed = 0;
  std::vector<double> init_lo;  // per coordinate; size 1 broadcasts
  std::vector<double> init_hi;

  /// Grid+refine for scalar parameters, Nelder-Mead with 5 restarts
  /// otherwise; init box [-10, 10] per coordinate.
  static OptimizerConfig defaults(std::size_t param_dim);
};

struct RestartInfo {
  std::vector<double> theta;
  double log_value = 0.0;
  int iterations = 0;
  bool ok = false;
};

struct EstimateResult {
  std::vector<double> theta;
  double value = 0.0;  // objective ratio at theta
  std::vector<RestartInfo> restarts;
};

/// Best parameter over all restarts. Throws no_convergence when every
/// restart fails to produce a finite objective.
EstimateResult estimate(const MaxCorrProblem& problem, const OptimizerConfig& cfg);

}  // namespace destim
