#pragma once

// Test-only oracles, kept independent of the library implementations they
// check: plain finite differences, composite Simpson quadrature, and dense
// grid searches with recursive zoom.

#include <cmath>
#include <functional>
#include <span>
#include <vector>

namespace oracles {

inline double central_diff(const std::function<double(double)>& f, double x, double step) {
  return (f(x + step) - f(x - step)) / (2.0 * step);
}

/// Central finite-difference gradient of a multivariate function.
inline std::vector<double> fd_gradient(const std::function<double(std::span<const double>)>& f,
                                       std::span<const double> x, double step) {
  std::vector<double> point(x.begin(), x.end());
  std::vector<double> grad(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    double orig = point[i];
    point[i] = orig + step;
    double hi = f(point);
    point[i] = orig - step;
    double lo = f(point);
    point[i] = orig;
    grad[i] = (hi - lo) / (2.0 * step);
  }
  return grad;
}

/// |a - b| measured against max(|b|, floor).
inline double rel_err(double a, double b, double floor = 1e-6) {
  return std::abs(a - b) / std::max(std::abs(b), floor);
}

inline double simpson(const std::function<double(double)>& f, double lo, double hi,
                      std::size_t intervals) {
  if (intervals % 2 == 1) ++intervals;
  double h = (hi - lo) / static_cast<double>(intervals);
  double acc = f(lo) + f(hi);
  for (std::size_t i = 1; i < intervals; ++i)
    acc += f(lo + h * static_cast<double>(i)) * (i % 2 == 1 ? 4.0 : 2.0);
  return acc * h / 3.0;
}

/// Dense scan for the minimizer, then recursive zoom around the best cell
/// until the grid spacing drops below x_tol.
inline double grid_zoom_min(const std::function<double(double)>& f, double lo, double hi,
                            int points, double x_tol) {
  double a = lo, b = hi;
  double best_x = lo;
  while (true) {
    double step = (b - a) / (points - 1);
    double best_val = f(a);
    best_x = a;
    for (int i = 1; i < points; ++i) {
      double x = a + step * i;
      double v = f(x);
      if (v < best_val) {
        best_val = v;
        best_x = x;
      }
    }
    if (step <= x_tol) return best_x;
    a = std::max(lo, best_x - step);
    b = std::min(hi, best_x + step);
  }
}

inline double grid_zoom_max(const std::function<double(double)>& f, double lo, double hi,
                            int points, double x_tol) {
  return grid_zoom_min([&](double x) { return -f(x); }, lo, hi, points, x_tol);
}

/// Minimizer over a fixed-resolution grid (no zoom); returns the best grid
/// point.
inline double dense_grid_min(const std::function<double(double)>& f, double lo, double hi,
                             double step) {
  double best_x = lo;
  double best_val = f(lo);
  for (double x = lo + step; x <= hi; x += step) {
    double v = f(x);
    if (v < best_val) {
      best_val = v;
      best_x = x;
    }
  }
  return best_x;
}

}  // namespace oracles
