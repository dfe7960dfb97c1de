#pragma once

#include <functional>
#include <vector>

namespace destim {

struct ScalarOptResult {
  double x = 0.0;
  double value = 0.0;
  int iterations = 0;
};

/// Golden-section search for a minimum of f on [lo, hi]; f is assumed
/// unimodal on the bracket.
ScalarOptResult golden_section_min(const std::function<double(double)>& f, double lo, double hi,
                                   double x_tol, int max_iters = 200);

/// Dense scan of `grid_points` equispaced points, then golden-section
/// refinement inside the neighbouring cells of the best point. Robust against
/// local minima at the grid resolution.
ScalarOptResult grid_then_refine_min(const std::function<double(double)>& f, double lo, double hi,
                                     int grid_points, double x_tol);

struct SimplexResult {
  std::vector<double> x;
  double value = 0.0;
  int iterations = 0;
  bool converged = false;
};

/// Nelder-Mead downhill simplex minimization. The initial simplex is x0 plus
/// `scale`-sized steps along each coordinate.
SimplexResult nelder_mead_min(const std::function<double(const std::vector<double>&)>& f,
                              const std::vector<double>& x0, double scale, double f_tol,
                              int max_iters);

}  // namespace destim
