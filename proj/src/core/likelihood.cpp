#include "core/likelihood.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "core/rng.hpp"

namespace destim {

LikelihoodModel translation_likelihood(Family family, double mu, std::size_t dim) {
  require(dim >= 1, Errc::invalid_argument, "translation_likelihood: dim must be positive");
  DistributionSpec base{family, 0.0};
  LikelihoodModel model;
  model.theta_dim = dim;
  model.log_likelihood = [base, mu, dim](std::span<const double> x,
                                         std::span<const double> theta) {
    require(theta.size() == dim, Errc::dimension_mismatch,
            "translation_likelihood: theta length mismatch");
    require(!x.empty() && x.size() % dim == 0, Errc::dimension_mismatch,
            "translation_likelihood: x length must be a positive multiple of dim");
    double acc = 0.0;
    for (std::size_t r = 0; r < x.size(); r += dim)
      for (std::size_t j = 0; j < dim; ++j) acc += log_density(base, x[r + j] - mu - theta[j]);
    return acc;
  };
  return model;
}

namespace {

void check_prior(const LikelihoodModel& model, const PriorSamples& prior) {
  require(prior.rows() >= 1, Errc::invalid_argument, "prior sample set is empty");
  require(prior.cols() == model.theta_dim, Errc::dimension_mismatch,
          "prior sample dimension != theta_dim");
}

std::vector<double> log_weights(const LikelihoodModel& model, const PriorSamples& prior,
                                std::span<const double> x) {
  std::vector<double> lw(prior.rows());
  for (std::size_t i = 0; i < prior.rows(); ++i) lw[i] = model.log_likelihood(x, prior.row(i));
  return lw;
}

/// exp(lw - max lw); throws when every log-weight is -inf.
std::vector<double> normalized_weights(std::vector<double> lw) {
  double top = -std::numeric_limits<double>::infinity();
  for (double v : lw) top = std::max(top, v);
  require(std::isfinite(top), Errc::degenerate_weights,
          "all likelihood weights vanish: X is incompatible with every prior sample");
  for (double& v : lw) v = std::exp(v - top);
  return lw;
}

}  // namespace

std::vector<double> mmse_estimate(const LikelihoodModel& model, const PriorSamples& prior,
                                  std::span<const double> x) {
  check_prior(model, prior);
  std::vector<double> w = normalized_weights(log_weights(model, prior, x));
  double wsum = std::accumulate(w.begin(), w.end(), 0.0);
  require(wsum > 0.0, Errc::degenerate_weights, "likelihood weights sum to zero");
  std::vector<double> out(model.theta_dim, 0.0);
  for (std::size_t i = 0; i < prior.rows(); ++i) {
    auto row = prior.row(i);
    for (std::size_t j = 0; j < out.size(); ++j) out[j] += w[i] * row[j];
  }
  for (double& v : out) v /= wsum;
  return out;
}

std::vector<double> mmae_estimate(const LikelihoodModel& model, const PriorSamples& prior,
                                  std::span<const double> x) {
  check_prior(model, prior);
  std::vector<double> w = normalized_weights(log_weights(model, prior, x));
  double wsum = std::accumulate(w.begin(), w.end(), 0.0);
  require(wsum > 0.0, Errc::degenerate_weights, "likelihood weights sum to zero");

  std::vector<double> out(model.theta_dim);
  std::vector<std::size_t> idx(prior.rows());
  for (std::size_t j = 0; j < model.theta_dim; ++j) {
    std::iota(idx.begin(), idx.end(), 0);
    std::sort(idx.begin(), idx.end(),
              [&](std::size_t a, std::size_t b) { return prior.at(a, j) < prior.at(b, j); });
    double cum = 0.0;
    double value = prior.at(idx.back(), j);
    for (std::size_t k = 0; k < idx.size(); ++k) {
      cum += w[idx[k]];
      if (cum >= 0.5 * wsum) {
        value = prior.at(idx[k], j);
        break;
      }
    }
    out[j] = value;
  }
  return out;
}

IterateResult sgd_iterate(const LikelihoodModel& model, const PriorSamples& prior,
                          std::span<const double> x, CostKind cost, const SgdOptions& opt,
                          std::span<const double> u0) {
  check_prior(model, prior);
  require(opt.mu >= 0.0, Errc::invalid_argument, "sgd_iterate: mu must be nonnegative");
  require(u0.size() == model.theta_dim, Errc::dimension_mismatch, "sgd_iterate: u0 length");

  std::vector<double> weights(prior.rows());
  bool any_positive = false;
  for (std::size_t i = 0; i < prior.rows(); ++i) {
    weights[i] = std::exp(model.log_likelihood(x, prior.row(i)));
    any_positive = any_positive || weights[i] > 0.0;
  }

  IterateResult res;
  res.u.assign(u0.begin(), u0.end());
  res.degenerate_weights = !any_positive;
  if (res.degenerate_weights) return res;

  Rng rng(opt.seed);
  std::vector<std::size_t> order(prior.rows());
  std::iota(order.begin(), order.end(), 0);
  std::vector<double> grad(model.theta_dim);
  const double n = static_cast<double>(prior.rows());
  std::size_t t = 0;
  for (std::size_t sweep = 0; sweep < opt.sweeps; ++sweep) {
    rng.shuffle(order);
    for (std::size_t i : order) {
      double step = opt.decay ? opt.mu / (1.0 + static_cast<double>(t) / n) : opt.mu;
      cost_grad_u(cost, res.u, prior.row(i), grad);
      for (std::size_t j = 0; j < grad.size(); ++j) res.u[j] -= step * grad[j] * weights[i];
      ++t;
    }
    for (double v : res.u)
      require(std::isfinite(v), Errc::diverged, "sgd_iterate: iterate became non-finite");
    res.iterations = sweep + 1;
  }
  return res;
}

IterateResult gd_iterate(const LikelihoodModel& model, const PriorSamples& prior,
                         std::span<const double> x, CostKind cost, const GdOptions& opt,
                         std::span<const double> u0) {
  check_prior(model, prior);
  require(opt.mu > 0.0, Errc::invalid_argument, "gd_iterate: mu must be positive");
  require(u0.size() == model.theta_dim, Errc::dimension_mismatch, "gd_iterate: u0 length");

  std::vector<double> weights(prior.rows());
  bool any_positive = false;
  for (std::size_t i = 0; i < prior.rows(); ++i) {
    weights[i] = std::exp(model.log_likelihood(x, prior.row(i)));
    any_positive = any_positive || weights[i] > 0.0;
  }

  IterateResult res;
  res.u.assign(u0.begin(), u0.end());
  res.degenerate_weights = !any_positive;

  const double inv_n = 1.0 / static_cast<double>(prior.rows());
  std::vector<double> grad(model.theta_dim);
  std::vector<double> total(model.theta_dim);
  for (std::size_t iter = 1; iter <= opt.max_iters; ++iter) {
    std::fill(total.begin(), total.end(), 0.0);
    for (std::size_t i = 0; i < prior.rows(); ++i) {
      if (weights[i] == 0.0) continue;
      cost_grad_u(cost, res.u, prior.row(i), grad);
      for (std::size_t j = 0; j < grad.size(); ++j) total[j] += grad[j] * weights[i];
    }
    double step_norm_sq = 0.0;
    for (std::size_t j = 0; j < total.size(); ++j) {
      double step = opt.mu * inv_n * total[j];
      res.u[j] -= step;
      step_norm_sq += step * step;
      require(std::isfinite(res.u[j]), Errc::diverged, "gd_iterate: iterate became non-finite");
    }
    res.iterations = iter;
    if (std::sqrt(step_norm_sq) < opt.tolerance) {
      res.converged = true;
      return res;
    }
  }
  return res;
}

}  // namespace destim
