#include "core/optim.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "core/common.hpp"

namespace destim {

ScalarOptResult golden_section_min(const std::function<double(double)>& f, double lo, double hi,
                                   double x_tol, int max_iters) {
  require(lo <= hi, Errc::invalid_argument, "golden_section_min: empty bracket");
  constexpr double inv_phi = 0.6180339887498949;
  double a = lo, b = hi;
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double fc = f(c), fd = f(d);
  int iters = 0;
  while (b - a > x_tol && iters < max_iters) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = f(d);
    }
    ++iters;
  }
  double x = fc < fd ? c : d;
  return {x, std::min(fc, fd), iters};
}

ScalarOptResult grid_then_refine_min(const std::function<double(double)>& f, double lo, double hi,
                                     int grid_points, double x_tol) {
  require(grid_points >= 2 && lo < hi, Errc::invalid_argument,
          "grid_then_refine_min: bad grid");
  double step = (hi - lo) / (grid_points - 1);
  int best = 0;
  double best_val = f(lo);
  for (int i = 1; i < grid_points; ++i) {
    double v = f(lo + i * step);
    if (v < best_val) {
      best_val = v;
      best = i;
    }
  }
  double a = std::max(lo, lo + (best - 1) * step);
  double b = std::min(hi, lo + (best + 1) * step);
  ScalarOptResult refined = golden_section_min(f, a, b, x_tol);
  refined.iterations += grid_points;
  if (best_val < refined.value) return {lo + best * step, best_val, refined.iterations};
  return refined;
}

SimplexResult nelder_mead_min(const std::function<double(const std::vector<double>&)>& f,
                              const std::vector<double>& x0, double scale, double f_tol,
                              int max_iters) {
  const std::size_t dim = x0.size();
  require(dim >= 1, Errc::invalid_argument, "nelder_mead_min: empty start point");

  std::vector<std::vector<double>> pts(dim + 1, x0);
  for (std::size_t i = 0; i < dim; ++i) pts[i + 1][i] += scale;
  std::vector<double> vals(dim + 1);
  for (std::size_t i = 0; i <= dim; ++i) vals[i] = f(pts[i]);

  auto order = [&] {
    std::vector<std::size_t> idx(dim + 1);
    std::iota(idx.begin(), idx.end(), 0);
    std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return vals[a] < vals[b]; });
    std::vector<std::vector<double>> p2(dim + 1);
    std::vector<double> v2(dim + 1);
    for (std::size_t k = 0; k <= dim; ++k) {
      p2[k] = pts[idx[k]];
      v2[k] = vals[idx[k]];
    }
    pts.swap(p2);
    vals.swap(v2);
  };

  constexpr double alpha = 1.0, gamma = 2.0, rho = 0.5, sigma = 0.5;
  int iter = 0;
  for (; iter < max_iters; ++iter) {
    order();
    if (std::abs(vals[dim] - vals[0]) <= f_tol) break;

    std::vector<double> centroid(dim, 0.0);
    for (std::size_t k = 0; k < dim; ++k)
      for (std::size_t i = 0; i < dim; ++i) centroid[i] += pts[k][i] / static_cast<double>(dim);

    auto blend = [&](const std::vector<double>& from, double coeff) {
      std::vector<double> p(dim);
      for (std::size_t i = 0; i < dim; ++i) p[i] = centroid[i] + coeff * (from[i] - centroid[i]);
      return p;
    };

    std::vector<double> reflected = blend(pts[dim], -alpha);
    double fr = f(reflected);
    if (fr < vals[0]) {
      std::vector<double> expanded = blend(pts[dim], -alpha * gamma);
      double fe = f(expanded);
      if (fe < fr) {
        pts[dim] = std::move(expanded);
        vals[dim] = fe;
      } else {
        pts[dim] = std::move(reflected);
        vals[dim] = fr;
      }
    } else if (fr < vals[dim - 1]) {
      pts[dim] = std::move(reflected);
      vals[dim] = fr;
    } else {
      bool outside = fr < vals[dim];
      std::vector<double> contracted = outside ? blend(reflected, rho) : blend(pts[dim], rho);
      double fc = f(contracted);
      if (fc < std::min(fr, vals[dim])) {
        pts[dim] = std::move(contracted);
        vals[dim] = fc;
      } else {
        for (std::size_t k = 1; k <= dim; ++k) {
          for (std::size_t i = 0; i < dim; ++i)
            pts[k][i] = pts[0][i] + sigma * (pts[k][i] - pts[0][i]);
          vals[k] = f(pts[k]);
        }
      }
    }
  }
  order();
  return {pts[0], vals[0], iter, iter < max_iters};
}

}  // namespace destim
