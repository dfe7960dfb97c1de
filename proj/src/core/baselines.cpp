#include "core/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "core/optim.hpp"

namespace destim {

double mean(std::span<const double> data) {
  require(!data.empty(), Errc::invalid_argument, "mean of empty dataset");
  double acc = 0.0;
  for (double v : data) acc += v;
  return acc / static_cast<double>(data.size());
}

double median(std::span<const double> data) {
  require(!data.empty(), Errc::invalid_argument, "median of empty dataset");
  std::vector<double> sorted(data.begin(), data.end());
  std::sort(sorted.begin(), sorted.end());
  std::size_t n = sorted.size();
  if (n % 2 == 1) return sorted[n / 2];
  return 0.5 * (sorted[n / 2 - 1] + sorted[n / 2]);
}

double moment_matching(std::span<const double> x, std::span<const double> z) {
  return mean(x) - mean(z);
}

namespace {

double quantile(std::vector<double> sorted, double q) {
  double pos = q * static_cast<double>(sorted.size() - 1);
  std::size_t lo = static_cast<std::size_t>(pos);
  std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  double frac = pos - static_cast<double>(lo);
  return sorted[lo] * (1.0 - frac) + sorted[hi] * frac;
}

double cauchy_ml_location(std::span<const double> data) {
  std::vector<double> sorted(data.begin(), data.end());
  std::sort(sorted.begin(), sorted.end());
  double med = data.size() % 2 == 1
                   ? sorted[data.size() / 2]
                   : 0.5 * (sorted[data.size() / 2 - 1] + sorted[data.size() / 2]);
  double iqr = quantile(sorted, 0.75) - quantile(sorted, 0.25);
  if (iqr <= 0.0) return med;

  DistributionSpec base{Family::cauchy, 0.0};
  auto neg_loglik = [&](double nu) {
    double acc = 0.0;
    for (double v : data) acc -= log_density(base, v - nu);
    return acc;
  };
  // The likelihood can have minor local maxima; scan before refining.
  ScalarOptResult res = grid_then_refine_min(neg_loglik, med - 2.0 * iqr, med + 2.0 * iqr, 201, 1e-10);
  return res.x;
}

}  // namespace

double ml_location(std::span<const double> data, Family family) {
  require(!data.empty(), Errc::invalid_argument, "ml_location of empty dataset");
  switch (family) {
    case Family::gaussian:
      return mean(data);
    case Family::laplace:
      return median(data);
    case Family::cauchy:
      return cauchy_ml_location(data);
  }
  fail(Errc::invalid_argument, "unknown distribution family");
}

double mle_translation(std::span<const double> x, std::span<const double> z, Family family) {
  return ml_location(x, family) - ml_location(z, family);
}

double huber_objective(std::span<const double> data, double nu, double c) {
  double acc = 0.0;
  for (double v : data) {
    double w = std::abs(v - nu);
    acc += w <= c ? w * w : 2.0 * c * w - c * c;
  }
  return acc;
}

double huber_location(std::span<const double> data, const HuberConfig& cfg) {
  require(!data.empty(), Errc::invalid_argument, "huber_location of empty dataset");
  require(cfg.c > 0.0, Errc::invalid_argument, "huber c must be positive");
  if (data.size() == 1) return data[0];

  double nu = median(data);
  for (int iter = 0; iter < cfg.max_iters; ++iter) {
    double wsum = 0.0, acc = 0.0;
    for (double v : data) {
      double r = std::abs(v - nu);
      double w = r <= cfg.c ? 1.0 : cfg.c / r;
      wsum += w;
      acc += w * v;
    }
    double next = acc / wsum;
    if (std::abs(next - nu) < cfg.tolerance) return next;
    nu = next;
  }

  // Reweighting stalled; the objective is convex, so a bracketed
  // golden-section search always lands on the minimizer.
  auto lohi = std::minmax_element(data.begin(), data.end());
  ScalarOptResult res = golden_section_min(
      [&](double v) { return huber_objective(data, v, cfg.c); }, *lohi.first, *lohi.second,
      cfg.tolerance, 400);
  return res.x;
}

double huber_translation(std::span<const double> x, std::span<const double> z,
                         const HuberConfig& cfg) {
  return huber_location(x, cfg) - huber_location(z, cfg);
}

}  // namespace destim
