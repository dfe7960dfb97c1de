#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "core/common.hpp"
#include "core/costs.hpp"
#include "core/distributions.hpp"

namespace destim {

/// Known conditional density f(X|theta), supplied as a log-likelihood so
/// callers can work below double underflow.
struct LikelihoodModel {
  std::size_t theta_dim = 1;
  std::function<double(std::span<const double> x, std::span<const double> theta)> log_likelihood;
};

/// Translation model f(X|theta) = prod_j g0(x_j - mu - theta_j). `x` may also
/// carry several i.i.d. observations of `dim` values; rows multiply.
LikelihoodModel translation_likelihood(Family family, double mu, std::size_t dim);

/// Rows are realizations of theta drawn from the unknown prior.
using PriorSamples = Matrix;

/// Likelihood-weighted posterior mean: sum theta_i f(X|theta_i) / sum f(X|theta_i).
/// Weights are formed from log-likelihoods with max-log subtraction, which
/// leaves the ratio unchanged. Throws degenerate_weights when every weight
/// vanishes.
std::vector<double> mmse_estimate(const LikelihoodModel& model, const PriorSamples& prior,
                                  std::span<const double> x);

/// Per-coordinate weighted median of the prior samples with weights
/// f(X|theta_i): the minimizer of the sample absolute-error objective.
/// Convention: smallest value whose cumulative weight reaches half the total.
std::vector<double> mmae_estimate(const LikelihoodModel& model, const PriorSamples& prior,
                                  std::span<const double> x);

struct IterateResult {
  std::vector<double> u;
  std::size_t iterations = 0;  // sweeps (sgd) or steps (gd)
  bool converged = false;      // gd only
  bool degenerate_weights = false;
};

struct SgdOptions {
  double mu = 0.0;
  std::size_t sweeps = 1;
  std::uint64_t seed = 0;
  bool decay = false;  // mu_t = mu / (1 + t/n)
};

/// Per-observation stochastic iteration U <- U - mu * grad_U C(U, theta_t) * f(X|theta_t),
/// cycling through freshly shuffled prior samples each sweep. Weights are the
/// raw likelihood values; if all of them underflow to zero the start point is
/// returned with the degenerate flag set.
IterateResult sgd_iterate(const LikelihoodModel& model, const PriorSamples& prior,
                          std::span<const double> x, CostKind cost, const SgdOptions& opt,
                          std::span<const double> u0);

struct GdOptions {
  double mu = 0.0;
  std::size_t max_iters = 10000;
  double tolerance = 1e-10;  // on the step norm
};

/// Full-batch iteration U <- U - mu * (1/n) sum grad_U C(U, theta_i) f(X|theta_i).
/// converged=false signals non-convergence within max_iters; the last iterate
/// is still returned.
IterateResult gd_iterate(const LikelihoodModel& model, const PriorSamples& prior,
                         std::span<const double> x, CostKind cost, const GdOptions& opt,
                         std::span<const double> u0);

}  // namespace destim
