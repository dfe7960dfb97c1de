#include "core/maxcorr.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "core/optim.hpp"

namespace destim {

double kernel_eval(const KernelConfig& cfg, std::span<const double> x, std::span<const double> y) {
  require(cfg.bandwidth > 0.0, Errc::invalid_argument, "kernel bandwidth must be positive");
  require(x.size() == y.size(), Errc::dimension_mismatch, "kernel_eval: length mismatch");
  double d2 = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    double d = x[i] - y[i];
    d2 += d * d;
  }
  return std::exp(-d2 / cfg.bandwidth);
}

void MaxCorrProblem::validate() const {
  destim::validate(transform);
  require(kernel.bandwidth > 0.0, Errc::invalid_argument, "kernel bandwidth must be positive");
  require(x_data.rows() >= 1 && z_split_1.rows() >= 1 && z_split_2.rows() >= 1,
          Errc::invalid_argument, "all three datasets must be nonempty");
  require(x_data.cols() == transform.output_dim, Errc::dimension_mismatch,
          "x_data dimension != transform output_dim");
  require(z_split_1.cols() == transform.input_dim && z_split_2.cols() == transform.input_dim,
          Errc::dimension_mismatch, "latent dimension != transform input_dim");
}

std::pair<Matrix, Matrix> split_latent(const Matrix& z, std::size_t m1, std::uint64_t seed) {
  require(m1 >= 1 && m1 < z.rows(), Errc::invalid_argument,
          "split_latent: m1 must be in [1, size)");
  std::vector<std::size_t> idx(z.rows());
  std::iota(idx.begin(), idx.end(), 0);
  Rng rng(seed);
  rng.shuffle(idx);
  Matrix a(m1, z.cols());
  Matrix b(z.rows() - m1, z.cols());
  for (std::size_t i = 0; i < m1; ++i) std::ranges::copy(z.row(idx[i]), a.row(i).begin());
  for (std::size_t i = m1; i < z.rows(); ++i)
    std::ranges::copy(z.row(idx[i]), b.row(i - m1).begin());
  return {std::move(a), std::move(b)};
}

namespace {

struct KernelSums {
  double n1 = 0.0;
  double n2 = 0.0;
  double d = 0.0;
};

Matrix transform_rows(const TransformSpec& spec, const Matrix& z, std::span<const double> theta) {
  Matrix out(z.rows(), spec.output_dim);
  for (std::size_t i = 0; i < z.rows(); ++i) apply(spec, z.row(i), theta, out.row(i));
  return out;
}

double cross_kernel_sum(const Matrix& a, const Matrix& b, double h) {
  const std::size_t dim = a.cols();
  const double inv_h = 1.0 / h;
  double total = 0.0;
  for (std::size_t i = 0; i < a.rows(); ++i) {
    const double* pa = a.data().data() + i * dim;
    for (std::size_t j = 0; j < b.rows(); ++j) {
      const double* pb = b.data().data() + j * dim;
      double d2 = 0.0;
      for (std::size_t k = 0; k < dim; ++k) {
        double d = pa[k] - pb[k];
        d2 += d * d;
      }
      total += std::exp(-d2 * inv_h);
    }
  }
  return total;
}

KernelSums kernel_sums(const MaxCorrProblem& p, std::span<const double> theta) {
  require(theta.size() == p.param_dim(), Errc::dimension_mismatch, "theta length != param_dim");
  for (double v : theta)
    require(std::isfinite(v), Errc::invalid_argument, "objective: non-finite theta");
  Matrix t1 = transform_rows(p.transform, p.z_split_1, theta);
  Matrix t2 = transform_rows(p.transform, p.z_split_2, theta);
  double h = p.kernel.bandwidth;
  return {cross_kernel_sum(p.x_data, t1, h), cross_kernel_sum(p.x_data, t2, h),
          cross_kernel_sum(t1, t2, h)};
}

}  // namespace

double objective(const MaxCorrProblem& problem, std::span<const double> theta) {
  problem.validate();
  KernelSums s = kernel_sums(problem, theta);
  require(s.d > 0.0, Errc::invalid_argument,
          "objective denominator underflowed to zero; theta is far outside the data scale");
  return s.n1 * s.n2 / s.d;
}

double log_objective(const MaxCorrProblem& problem, std::span<const double> theta) {
  problem.validate();
  KernelSums s = kernel_sums(problem, theta);
  if (s.n1 <= 0.0 || s.n2 <= 0.0 || s.d <= 0.0)
    return -std::numeric_limits<double>::infinity();
  return std::log(s.n1) + std::log(s.n2) - std::log(s.d);
}

std::vector<double> objective_gradient(const MaxCorrProblem& problem,
                                       std::span<const double> theta) {
  problem.validate();
  const TransformSpec& tf = problem.transform;
  const std::size_t pdim = problem.param_dim();
  require(theta.size() == pdim, Errc::dimension_mismatch, "theta length != param_dim");
  for (double v : theta)
    require(std::isfinite(v), Errc::invalid_argument, "gradient: non-finite theta");

  const double inv_h = 1.0 / problem.kernel.bandwidth;
  Matrix t1 = transform_rows(tf, problem.z_split_1, theta);
  Matrix t2 = transform_rows(tf, problem.z_split_2, theta);
  std::vector<Matrix> j1(problem.z_split_1.rows());
  std::vector<Matrix> j2(problem.z_split_2.rows());
  for (std::size_t i = 0; i < j1.size(); ++i)
    j1[i] = jacobian_theta(tf, problem.z_split_1.row(i), theta);
  for (std::size_t i = 0; i < j2.size(); ++i)
    j2[i] = jacobian_theta(tf, problem.z_split_2.row(i), theta);

  const std::size_t odim = tf.output_dim;
  double n1 = 0.0, n2 = 0.0, d = 0.0;
  std::vector<double> dn1(pdim, 0.0), dn2(pdim, 0.0), dd(pdim, 0.0);
  std::vector<double> diff(odim);

  // d/dtheta K(a, T(z,theta)) = K * (-2/h) (T(z,theta)-a)^T J(z).
  auto accumulate_numerator = [&](const Matrix& t, const std::vector<Matrix>& jac, double& sum,
                                  std::vector<double>& grad) {
    for (std::size_t i = 0; i < problem.x_data.rows(); ++i) {
      auto xr = problem.x_data.row(i);
      for (std::size_t j = 0; j < t.rows(); ++j) {
        auto tr = t.row(j);
        double d2 = 0.0;
        for (std::size_t k = 0; k < odim; ++k) {
          diff[k] = tr[k] - xr[k];
          d2 += diff[k] * diff[k];
        }
        double kv = std::exp(-d2 * inv_h);
        sum += kv;
        double scale = -2.0 * inv_h * kv;
        for (std::size_t k = 0; k < odim; ++k) {
          double c = scale * diff[k];
          auto jrow = jac[j].row(k);
          for (std::size_t p = 0; p < pdim; ++p) grad[p] += c * jrow[p];
        }
      }
    }
  };
  accumulate_numerator(t1, j1, n1, dn1);
  accumulate_numerator(t2, j2, n2, dn2);

  // Both denominator arguments move with theta: chain rule takes J1 - J2.
  for (std::size_t i = 0; i < t1.rows(); ++i) {
    auto a = t1.row(i);
    for (std::size_t j = 0; j < t2.rows(); ++j) {
      auto b = t2.row(j);
      double d2 = 0.0;
      for (std::size_t k = 0; k < odim; ++k) {
        diff[k] = a[k] - b[k];
        d2 += diff[k] * diff[k];
      }
      double kv = std::exp(-d2 * inv_h);
      d += kv;
      double scale = -2.0 * inv_h * kv;
      for (std::size_t k = 0; k < odim; ++k) {
        double c = scale * diff[k];
        auto ja = j1[i].row(k);
        auto jb = j2[j].row(k);
        for (std::size_t p = 0; p < pdim; ++p) dd[p] += c * (ja[p] - jb[p]);
      }
    }
  }

  require(d > 0.0, Errc::invalid_argument, "gradient denominator underflowed to zero");
  double ratio = n1 * n2 / d;
  std::vector<double> grad(pdim);
  for (std::size_t p = 0; p < pdim; ++p)
    grad[p] = (dn1[p] * n2 + n1 * dn2[p]) / d - ratio * dd[p] / d;
  return grad;
}

OptimizerConfig OptimizerConfig::defaults(std::size_t param_dim) {
  OptimizerConfig cfg;
  cfg.init_lo.assign(1, -10.0);
  cfg.init_hi.assign(1, 10.0);
  if (param_dim <= 1) {
    cfg.method = OptMethod::grid_then_refine;
    cfg.restarts = 1;
  } else {
    cfg.method = OptMethod::nelder_mead;
    cfg.restarts = 5;
    cfg.tolerance = 1e-10;
  }
  return cfg;
}

namespace {

constexpr int kGridPoints = 201;

double box_coord(const std::vector<double>& box, std::size_t i, double fallback) {
  if (box.empty()) return fallback;
  return box.size() == 1 ? box[0] : box[i];
}

RestartInfo run_grid_then_refine(const MaxCorrProblem& p, const OptimizerConfig& cfg) {
  double lo = box_coord(cfg.init_lo, 0, -10.0);
  double hi = box_coord(cfg.init_hi, 0, 10.0);
  require(lo < hi, Errc::invalid_argument, "init box is empty");
  auto neg = [&](double t) {
    double v = log_objective(p, std::span<const double>(&t, 1));
    return -v;
  };
  ScalarOptResult res = grid_then_refine_min(neg, lo, hi, kGridPoints, cfg.tolerance);
  RestartInfo info;
  info.theta = {res.x};
  info.log_value = -res.value;
  info.iterations = res.iterations;
  info.ok = std::isfinite(info.log_value);
  return info;
}

RestartInfo run_nelder_mead(const MaxCorrProblem& p, const OptimizerConfig& cfg,
                            std::vector<double> start) {
  auto neg = [&](const std::vector<double>& t) { return -log_objective(p, t); };
  SimplexResult res =
      nelder_mead_min(neg, start, cfg.step_scale, cfg.tolerance, static_cast<int>(cfg.max_iters));
  RestartInfo info;
  info.theta = std::move(res.x);
  info.log_value = -res.value;
  info.iterations = res.iterations;
  info.ok = std::isfinite(info.log_value);
  return info;
}

RestartInfo run_gradient_ascent(const MaxCorrProblem& p, const OptimizerConfig& cfg,
                                std::vector<double> start) {
  RestartInfo info;
  info.theta = std::move(start);
  double value = log_objective(p, info.theta);
  int iters = 0;
  bool done = !std::isfinite(value);
  while (!done && iters < static_cast<int>(cfg.max_iters)) {
    ++iters;
    // Ascend the log objective so step scales stay comparable across theta.
    std::vector<double> grad = objective_gradient(p, info.theta);
    double ratio = objective(p, info.theta);
    double gnorm = 0.0;
    for (double& g : grad) {
      g /= ratio;
      gnorm += g * g;
    }
    gnorm = std::sqrt(gnorm);
    if (gnorm < cfg.tolerance) break;

    double step = cfg.step_scale;
    bool accepted = false;
    std::vector<double> candidate(info.theta.size());
    for (int halving = 0; halving < 40 && !accepted; ++halving) {
      for (std::size_t i = 0; i < candidate.size(); ++i)
        candidate[i] = info.theta[i] + step * grad[i];
      double cand_value = log_objective(p, candidate);
      if (cand_value > value) {
        info.theta = candidate;
        value = cand_value;
        accepted = true;
        done = step * gnorm < cfg.tolerance;
      } else {
        step *= 0.5;
      }
    }
    if (!accepted) break;
  }
  info.log_value = value;
  info.iterations = iters;
  info.ok = std::isfinite(value);
  return info;
}

}  // namespace

EstimateResult estimate(const MaxCorrProblem& problem, const OptimizerConfig& cfg) {
  problem.validate();
  require(cfg.restarts >= 1, Errc::invalid_argument, "restarts must be >= 1");
  const std::size_t pdim = problem.param_dim();

  EstimateResult result;
  Rng rng(cfg.seed);
  std::size_t restarts = cfg.method == OptMethod::grid_then_refine ? 1 : cfg.restarts;
  if (cfg.method == OptMethod::grid_then_refine)
    require(pdim == 1, Errc::invalid_argument, "grid_then_refine handles scalar theta only");

  for (std::size_t r = 0; r < restarts; ++r) {
    RestartInfo info;
    if (cfg.method == OptMethod::grid_then_refine) {
      info = run_grid_then_refine(problem, cfg);
    } else {
      std::vector<double> start(pdim);
      for (std::size_t i = 0; i < pdim; ++i)
        start[i] = rng.uniform(box_coord(cfg.init_lo, i, -10.0), box_coord(cfg.init_hi, i, 10.0));
      info = cfg.method == OptMethod::nelder_mead
                 ? run_nelder_mead(problem, cfg, std::move(start))
                 : run_gradient_ascent(problem, cfg, std::move(start));
    }
    result.restarts.push_back(std::move(info));
  }

  const RestartInfo* best = nullptr;
  for (const RestartInfo& info : result.restarts)
    if (info.ok && (!best || info.log_value > best->log_value)) best = &info;
  if (!best) {
    fail(Errc::no_convergence,
         "maxcorr estimate: no restart produced a finite objective (" +
             std::to_string(result.restarts.size()) + " attempted)");
  }
  result.theta = best->theta;
  result.value = objective(problem, result.theta);
  return result;
}

}  // namespace destim
