#pragma once

#include <span>

#include "core/distributions.hpp"

namespace destim {

/// Convex location cost: quadratic within +-c, linear beyond.
struct HuberConfig {
  double c = 1.0;
  int max_iters = 200;
  double tolerance = 1e-10;
};

double mean(std::span<const double> data);

/// Midpoint-of-interval convention for even sizes.
double median(std::span<const double> data);

/// First-moment matching: mean(x) - mean(z).
double moment_matching(std::span<const double> x, std::span<const double> z);

/// One-dataset ML location fit. Gaussian and Laplace have exact fits (mean,
/// median); the multimodal Cauchy likelihood is maximized numerically from a
/// median start over a bracket of +-2 interquartile ranges.
double ml_location(std::span<const double> data, Family family);

/// Two-dataset translation MLE: ml_location(x) - ml_location(z).
double mle_translation(std::span<const double> x, std::span<const double> z, Family family);

double huber_objective(std::span<const double> data, double nu, double c);

/// argmin_nu sum phi(data_i - nu) by iteratively reweighted averaging, with a
/// golden-section fallback on stall.
double huber_location(std::span<const double> data, const HuberConfig& cfg);

double huber_translation(std::span<const double> x, std::span<const double> z,
                         const HuberConfig& cfg);

}  // namespace destim
