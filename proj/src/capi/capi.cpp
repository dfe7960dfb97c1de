#include "destim/destim.h"

#include <cmath>
#include <cstring>
#include <limits>
#include <memory>
#include <string>

#include "core/baselines.hpp"
#include "core/bench.hpp"
#include "core/likelihood.hpp"
#include "core/maxcorr.hpp"
#include "core/net.hpp"
#include "core/report.hpp"

namespace {

thread_local std::string g_last_error;

void set_error(const std::string& msg) { g_last_error = msg; }

destim_status map_code(destim::Errc code) {
  switch (code) {
    case destim::Errc::invalid_argument:
      return DESTIM_ERR_INVALID_ARGUMENT;
    case destim::Errc::dimension_mismatch:
      return DESTIM_ERR_DIMENSION_MISMATCH;
    case destim::Errc::degenerate_weights:
      return DESTIM_ERR_DEGENERATE_WEIGHTS;
    case destim::Errc::no_convergence:
      return DESTIM_ERR_NO_CONVERGENCE;
    case destim::Errc::diverged:
      return DESTIM_ERR_DIVERGED;
    case destim::Errc::io_failure:
      return DESTIM_ERR_IO;
    case destim::Errc::parse_failure:
      return DESTIM_ERR_PARSE;
  }
  return DESTIM_ERR_INVALID_ARGUMENT;
}

template <typename Fn>
destim_status guarded(Fn&& fn) noexcept {
  try {
    fn();
    return DESTIM_OK;
  } catch (const destim::Error& e) {
    set_error(e.what());
    return map_code(e.code());
  } catch (const std::exception& e) {
    set_error(e.what());
    return DESTIM_ERR_INVALID_ARGUMENT;
  } catch (...) {
    set_error("unknown error");
    return DESTIM_ERR_INVALID_ARGUMENT;
  }
}

template <typename Fn>
auto guarded_ptr(Fn&& fn) noexcept -> decltype(fn()) {
  try {
    return fn();
  } catch (const std::exception& e) {
    set_error(e.what());
    return nullptr;
  } catch (...) {
    set_error("unknown error");
    return nullptr;
  }
}

destim::Family to_family(destim_family f) {
  switch (f) {
    case DESTIM_FAMILY_GAUSSIAN:
      return destim::Family::gaussian;
    case DESTIM_FAMILY_LAPLACE:
      return destim::Family::laplace;
    case DESTIM_FAMILY_CAUCHY:
      return destim::Family::cauchy;
  }
  destim::fail(destim::Errc::invalid_argument, "unknown family value");
}

destim::TransformKind to_transform(destim_transform_kind k) {
  switch (k) {
    case DESTIM_TRANSFORM_TRANSLATION:
      return destim::TransformKind::translation;
    case DESTIM_TRANSFORM_ELEMENTWISE_SCALE:
      return destim::TransformKind::elementwise_scale;
    case DESTIM_TRANSFORM_MATRIX:
      return destim::TransformKind::matrix;
  }
  destim::fail(destim::Errc::invalid_argument, "unknown transform kind");
}

destim::CostKind to_cost(destim_cost c) {
  switch (c) {
    case DESTIM_COST_SQUARED_ERROR:
      return destim::CostKind::squared_error;
    case DESTIM_COST_ABSOLUTE_ERROR:
      return destim::CostKind::absolute_error;
  }
  destim::fail(destim::Errc::invalid_argument,
               "unknown cost value (the MAP indicator cost is unsupported: its gradient is 0 or "
               "infinite everywhere)");
}

destim::Activation to_activation(destim_activation a) {
  switch (a) {
    case DESTIM_ACTIVATION_RELU:
      return destim::Activation::relu;
    case DESTIM_ACTIVATION_TANH:
      return destim::Activation::tanh;
  }
  destim::fail(destim::Errc::invalid_argument, "unknown activation value");
}

destim::EstimatorKind to_estimator(destim_estimator e) {
  switch (e) {
    case DESTIM_EST_MLE:
      return destim::EstimatorKind::mle;
    case DESTIM_EST_MOMENT_MATCHING:
      return destim::EstimatorKind::moment_matching;
    case DESTIM_EST_HUBER:
      return destim::EstimatorKind::huber;
    case DESTIM_EST_MAXCORR:
      return destim::EstimatorKind::maxcorr;
  }
  destim::fail(destim::Errc::invalid_argument, "unknown estimator value");
}

void check_ptr(const void* p, const char* what) {
  destim::require(p != nullptr, destim::Errc::invalid_argument,
                  std::string(what) + " must not be NULL");
}

destim::ExperimentConfig to_experiment_config(const destim_bench_config* cfg) {
  check_ptr(cfg, "config");
  destim::ExperimentConfig out;
  out.families.clear();
  for (destim_family f : {DESTIM_FAMILY_GAUSSIAN, DESTIM_FAMILY_LAPLACE, DESTIM_FAMILY_CAUCHY})
    if (cfg->family_mask & (1u << f)) out.families.push_back(to_family(f));
  out.estimators.clear();
  for (destim_estimator e : {DESTIM_EST_MLE, DESTIM_EST_MOMENT_MATCHING, DESTIM_EST_HUBER,
                             DESTIM_EST_MAXCORR})
    if (cfg->estimator_mask & (1u << e)) out.estimators.push_back(to_estimator(e));
  out.theta_true = cfg->theta_true;
  out.mu_true = cfg->mu_true;
  out.n = cfg->n;
  out.m = cfg->m;
  out.m1 = cfg->m1;
  out.m2 = cfg->m2;
  out.trials = cfg->trials;
  out.maxcorr_trials = cfg->maxcorr_trials;
  out.huber_c = cfg->huber_c;
  out.kernel_h = cfg->kernel_h;
  out.master_seed = cfg->master_seed;
  out.workers = cfg->workers;
  out.init_lo = cfg->init_lo;
  out.init_hi = cfg->init_hi;
  return out;
}

}  // namespace

struct destim_distribution {
  destim::DistributionSpec spec;
};

struct destim_transform {
  destim::TransformSpec spec;
};

struct destim_net {
  destim::NeuralEstimator net;
};

struct destim_likelihood {
  destim::LikelihoodModel model;
};

struct destim_maxcorr {
  destim::MaxCorrProblem problem;
};

struct destim_report {
  destim::ExperimentReport report;
  std::string text;
  std::string json;
};

extern "C" {

const char* destim_last_error(void) { return g_last_error.c_str(); }

const char* destim_version(void) { return "0.1.0"; }

/* ---------------- distributions ---------------- */

destim_distribution* destim_distribution_create(destim_family family, double location) {
  return guarded_ptr([&]() -> destim_distribution* {
    return new destim_distribution{{to_family(family), location}};
  });
}

void destim_distribution_destroy(destim_distribution* d) { delete d; }

destim_status destim_distribution_sample(const destim_distribution* d, uint64_t seed, size_t count,
                                         double* out) {
  return guarded([&] {
    check_ptr(d, "distribution");
    check_ptr(out, "out");
    destim::Rng rng(seed);
    std::vector<double> v = destim::sample(d->spec, count, rng);
    std::memcpy(out, v.data(), v.size() * sizeof(double));
  });
}

destim_status destim_distribution_log_density(const destim_distribution* d, double w,
                                              double* out) {
  return guarded([&] {
    check_ptr(d, "distribution");
    check_ptr(out, "out");
    *out = destim::log_density(d->spec, w);
  });
}

destim_status destim_distribution_score(const destim_distribution* d, double w, double* out) {
  return guarded([&] {
    check_ptr(d, "distribution");
    check_ptr(out, "out");
    *out = destim::score(d->spec, w);
  });
}

destim_status destim_distribution_fisher_information(const destim_distribution* d, double* out) {
  return guarded([&] {
    check_ptr(d, "distribution");
    check_ptr(out, "out");
    *out = destim::fisher_information(d->spec);
  });
}

destim_status destim_distribution_variance(const destim_distribution* d, double* out,
                                           int* is_infinite) {
  return guarded([&] {
    check_ptr(d, "distribution");
    check_ptr(out, "out");
    double v = destim::variance(d->spec);
    *out = v;
    if (is_infinite) *is_infinite = std::isinf(v) ? 1 : 0;
  });
}

destim_status destim_crlb(double fisher_information, uint64_t n, uint64_t m, double* out) {
  return guarded([&] {
    check_ptr(out, "out");
    *out = destim::crlb(fisher_information, n, m);
  });
}

/* ---------------- transforms ---------------- */

destim_transform* destim_transform_create(destim_transform_kind kind, size_t input_dim,
                                          size_t output_dim) {
  return guarded_ptr([&]() -> destim_transform* {
    destim::TransformSpec spec{to_transform(kind), input_dim, output_dim};
    destim::validate(spec);
    return new destim_transform{spec};
  });
}

void destim_transform_destroy(destim_transform* t) { delete t; }

size_t destim_transform_param_dim(const destim_transform* t) {
  return t ? destim::param_dim(t->spec) : 0;
}

size_t destim_transform_output_dim(const destim_transform* t) {
  return t ? t->spec.output_dim : 0;
}

destim_status destim_transform_apply(const destim_transform* t, const double* z, size_t z_len,
                                     const double* theta, size_t theta_len, double* out,
                                     size_t out_len) {
  return guarded([&] {
    check_ptr(t, "transform");
    check_ptr(z, "z");
    check_ptr(theta, "theta");
    check_ptr(out, "out");
    destim::apply(t->spec, {z, z_len}, {theta, theta_len}, {out, out_len});
  });
}

destim_status destim_transform_jacobian(const destim_transform* t, const double* z, size_t z_len,
                                        const double* theta, size_t theta_len, double* out,
                                        size_t out_len) {
  return guarded([&] {
    check_ptr(t, "transform");
    check_ptr(z, "z");
    check_ptr(theta, "theta");
    check_ptr(out, "out");
    destim::Matrix jac = destim::jacobian_theta(t->spec, {z, z_len}, {theta, theta_len});
    destim::require(out_len == jac.data().size(), destim::Errc::dimension_mismatch,
                    "jacobian output buffer has wrong length");
    std::memcpy(out, jac.data().data(), out_len * sizeof(double));
  });
}

/* ---------------- costs ---------------- */

destim_status destim_cost_eval(destim_cost kind, const double* u, const double* theta, size_t len,
                               double* out) {
  return guarded([&] {
    check_ptr(u, "u");
    check_ptr(theta, "theta");
    check_ptr(out, "out");
    *out = destim::cost(to_cost(kind), {u, len}, {theta, len});
  });
}

destim_status destim_cost_grad(destim_cost kind, const double* u, const double* theta, size_t len,
                               double* out) {
  return guarded([&] {
    check_ptr(u, "u");
    check_ptr(theta, "theta");
    check_ptr(out, "out");
    destim::cost_grad_u(to_cost(kind), {u, len}, {theta, len}, {out, len});
  });
}

/* ---------------- neural estimator ---------------- */

destim_net* destim_net_create(const size_t* layer_sizes, size_t n_layers,
                              destim_activation activation, uint64_t init_seed) {
  return guarded_ptr([&]() -> destim_net* {
    check_ptr(layer_sizes, "layer_sizes");
    std::vector<std::size_t> sizes(layer_sizes, layer_sizes + n_layers);
    return new destim_net{
        destim::NeuralEstimator::initialized(std::move(sizes), to_activation(activation),
                                             init_seed)};
  });
}

void destim_net_destroy(destim_net* net) { delete net; }

size_t destim_net_param_count(const destim_net* net) { return net ? net->net.param_count() : 0; }
size_t destim_net_input_dim(const destim_net* net) { return net ? net->net.input_dim() : 0; }
size_t destim_net_output_dim(const destim_net* net) { return net ? net->net.output_dim() : 0; }

destim_status destim_net_get_params(const destim_net* net, double* out, size_t len) {
  return guarded([&] {
    check_ptr(net, "net");
    check_ptr(out, "out");
    destim::require(len == net->net.param_count(), destim::Errc::dimension_mismatch,
                    "parameter buffer length mismatch");
    auto p = net->net.params();
    std::memcpy(out, p.data(), p.size() * sizeof(double));
  });
}

destim_status destim_net_set_params(destim_net* net, const double* values, size_t len) {
  return guarded([&] {
    check_ptr(net, "net");
    check_ptr(values, "values");
    destim::require(len == net->net.param_count(), destim::Errc::dimension_mismatch,
                    "parameter buffer length mismatch");
    std::copy(values, values + len, net->net.params().begin());
  });
}

destim_status destim_net_forward(const destim_net* net, const double* x, size_t x_len, double* out,
                                 size_t out_len) {
  return guarded([&] {
    check_ptr(net, "net");
    check_ptr(x, "x");
    check_ptr(out, "out");
    std::vector<double> u = net->net.forward({x, x_len});
    destim::require(out_len == u.size(), destim::Errc::dimension_mismatch,
                    "output buffer length mismatch");
    std::memcpy(out, u.data(), u.size() * sizeof(double));
  });
}

destim_status destim_net_grad(const destim_net* net, destim_cost cost, const double* x,
                              size_t x_len, const double* theta, size_t theta_len, double* out,
                              size_t out_len) {
  return guarded([&] {
    check_ptr(net, "net");
    check_ptr(x, "x");
    check_ptr(theta, "theta");
    check_ptr(out, "out");
    std::vector<double> g =
        destim::grad_alpha(net->net, to_cost(cost), {x, x_len}, {theta, theta_len});
    destim::require(out_len == g.size(), destim::Errc::dimension_mismatch,
                    "gradient buffer length mismatch");
    std::memcpy(out, g.data(), g.size() * sizeof(double));
  });
}

destim_status destim_net_sgd_step(destim_net* net, double learning_rate, destim_cost cost,
                                  const double* x, size_t x_len, const double* theta,
                                  size_t theta_len) {
  return guarded([&] {
    check_ptr(net, "net");
    check_ptr(x, "x");
    check_ptr(theta, "theta");
    destim::sgd_step(net->net, learning_rate, to_cost(cost), {x, x_len}, {theta, theta_len});
  });
}

void destim_train_config_default(destim_train_config* cfg) {
  if (!cfg) return;
  cfg->learning_rate = 0.01;
  cfg->max_epochs = 100;
  cfg->full_gradient = 0;
  cfg->shuffle_each_epoch = 1;
  cfg->seed = 0;
  cfg->early_stop_tolerance = 1e-8;
  cfg->cost = DESTIM_COST_SQUARED_ERROR;
}

namespace {

destim::TrainConfig to_train_config(const destim_train_config* cfg) {
  check_ptr(cfg, "train config");
  destim::TrainConfig out;
  out.learning_rate = cfg->learning_rate;
  out.max_epochs = cfg->max_epochs;
  out.batch_mode = cfg->full_gradient ? destim::BatchMode::full_gradient
                                      : destim::BatchMode::stochastic;
  out.shuffle_each_epoch = cfg->shuffle_each_epoch != 0;
  out.seed = cfg->seed;
  out.early_stop_tolerance = cfg->early_stop_tolerance;
  out.cost = to_cost(cfg->cost);
  return out;
}

destim::PairedDataset to_paired(const double* x, size_t x_dim, const double* theta,
                                size_t theta_dim, size_t n_pairs) {
  check_ptr(x, "x");
  check_ptr(theta, "theta");
  destim::PairedDataset data;
  data.x = destim::Matrix(n_pairs, x_dim, std::vector<double>(x, x + n_pairs * x_dim));
  data.theta =
      destim::Matrix(n_pairs, theta_dim, std::vector<double>(theta, theta + n_pairs * theta_dim));
  return data;
}

void fill_summary(const destim::TrainResult& res, destim_train_summary* summary) {
  if (!summary) return;
  summary->final_loss = res.final_loss;
  summary->epochs_run = res.epochs_run;
  summary->early_stopped = res.early_stopped ? 1 : 0;
}

}  // namespace

destim_status destim_net_train(destim_net* net, const destim_train_config* cfg, const double* x,
                               size_t x_dim, const double* theta, size_t theta_dim, size_t n_pairs,
                               double* loss_trace, size_t* trace_len,
                               destim_train_summary* summary) {
  return guarded([&] {
    check_ptr(net, "net");
    destim::TrainResult res =
        destim::train(net->net, to_train_config(cfg), to_paired(x, x_dim, theta, theta_dim, n_pairs));
    if (loss_trace && trace_len) {
      size_t count = std::min(*trace_len, res.loss_trace.size());
      std::memcpy(loss_trace, res.loss_trace.data(), count * sizeof(double));
      *trace_len = count;
    } else if (trace_len) {
      *trace_len = res.loss_trace.size();
    }
    fill_summary(res, summary);
  });
}

destim_net* destim_net_train_restarts(const size_t* layer_sizes, size_t n_layers,
                                      destim_activation activation,
                                      const destim_train_config* cfg, const double* x,
                                      size_t x_dim, const double* theta, size_t theta_dim,
                                      size_t n_pairs, size_t restarts,
                                      destim_train_summary* summary) {
  return guarded_ptr([&]() -> destim_net* {
    check_ptr(layer_sizes, "layer_sizes");
    std::vector<std::size_t> sizes(layer_sizes, layer_sizes + n_layers);
    destim::TrainResult best;
    destim::NeuralEstimator net = destim::train_with_restarts(
        sizes, to_activation(activation), to_train_config(cfg),
        to_paired(x, x_dim, theta, theta_dim, n_pairs), restarts, &best);
    fill_summary(best, summary);
    return new destim_net{std::move(net)};
  });
}

destim_status destim_net_save(const destim_net* net, const char* path) {
  return guarded([&] {
    check_ptr(net, "net");
    check_ptr(path, "path");
    destim::save_model(net->net, path);
  });
}

destim_net* destim_net_load(const char* path) {
  return guarded_ptr([&]() -> destim_net* {
    check_ptr(path, "path");
    return new destim_net{destim::load_model(path)};
  });
}

/* ---------------- likelihood estimators ---------------- */

destim_likelihood* destim_likelihood_translation(destim_family family, double mu, size_t dim) {
  return guarded_ptr([&]() -> destim_likelihood* {
    return new destim_likelihood{destim::translation_likelihood(to_family(family), mu, dim)};
  });
}

destim_likelihood* destim_likelihood_custom(destim_loglik_fn fn, void* ctx, size_t theta_dim) {
  return guarded_ptr([&]() -> destim_likelihood* {
    check_ptr(reinterpret_cast<const void*>(fn), "callback");
    destim::require(theta_dim >= 1, destim::Errc::invalid_argument,
                    "theta_dim must be positive");
    destim::LikelihoodModel model;
    model.theta_dim = theta_dim;
    model.log_likelihood = [fn, ctx](std::span<const double> x, std::span<const double> theta) {
      return fn(x.data(), x.size(), theta.data(), theta.size(), ctx);
    };
    return new destim_likelihood{std::move(model)};
  });
}

void destim_likelihood_destroy(destim_likelihood* lik) { delete lik; }

namespace {

destim::PriorSamples to_priors(const double* priors, size_t n_priors, size_t theta_dim) {
  check_ptr(priors, "priors");
  return destim::Matrix(n_priors, theta_dim,
                        std::vector<double>(priors, priors + n_priors * theta_dim));
}

}  // namespace

destim_status destim_bayes_mmse(const destim_likelihood* lik, const double* x, size_t x_len,
                                const double* priors, size_t n_priors, size_t theta_dim,
                                double* out) {
  return guarded([&] {
    check_ptr(lik, "likelihood");
    check_ptr(x, "x");
    check_ptr(out, "out");
    std::vector<double> u =
        destim::mmse_estimate(lik->model, to_priors(priors, n_priors, theta_dim), {x, x_len});
    std::memcpy(out, u.data(), u.size() * sizeof(double));
  });
}

destim_status destim_bayes_mmae(const destim_likelihood* lik, const double* x, size_t x_len,
                                const double* priors, size_t n_priors, size_t theta_dim,
                                double* out) {
  return guarded([&] {
    check_ptr(lik, "likelihood");
    check_ptr(x, "x");
    check_ptr(out, "out");
    std::vector<double> u =
        destim::mmae_estimate(lik->model, to_priors(priors, n_priors, theta_dim), {x, x_len});
    std::memcpy(out, u.data(), u.size() * sizeof(double));
  });
}

destim_status destim_bayes_sgd(const destim_likelihood* lik, const double* x, size_t x_len,
                               const double* priors, size_t n_priors, size_t theta_dim,
                               destim_cost cost, double mu, int decay, size_t sweeps,
                               uint64_t seed, const double* u0, double* out, int* degenerate) {
  return guarded([&] {
    check_ptr(lik, "likelihood");
    check_ptr(x, "x");
    check_ptr(u0, "u0");
    check_ptr(out, "out");
    destim::SgdOptions opt{mu, sweeps, seed, decay != 0};
    destim::IterateResult res =
        destim::sgd_iterate(lik->model, to_priors(priors, n_priors, theta_dim), {x, x_len},
                            to_cost(cost), opt, {u0, theta_dim});
    std::memcpy(out, res.u.data(), res.u.size() * sizeof(double));
    if (degenerate) *degenerate = res.degenerate_weights ? 1 : 0;
  });
}

destim_status destim_bayes_gd(const destim_likelihood* lik, const double* x, size_t x_len,
                              const double* priors, size_t n_priors, size_t theta_dim,
                              destim_cost cost, double mu, size_t max_iters, double tolerance,
                              const double* u0, double* out, size_t* iterations) {
  return guarded([&] {
    check_ptr(lik, "likelihood");
    check_ptr(x, "x");
    check_ptr(u0, "u0");
    check_ptr(out, "out");
    destim::GdOptions opt{mu, max_iters, tolerance};
    destim::IterateResult res =
        destim::gd_iterate(lik->model, to_priors(priors, n_priors, theta_dim), {x, x_len},
                           to_cost(cost), opt, {u0, theta_dim});
    std::memcpy(out, res.u.data(), res.u.size() * sizeof(double));
    if (iterations) *iterations = res.iterations;
    destim::require(res.converged, destim::Errc::no_convergence,
                    "gd_iterate did not converge within max_iters; out holds the last iterate");
  });
}

/* ---------------- maximal correlation ---------------- */

destim_status destim_kernel_eval(double h, const double* x, const double* y, size_t len,
                                 double* out) {
  return guarded([&] {
    check_ptr(x, "x");
    check_ptr(y, "y");
    check_ptr(out, "out");
    destim::KernelConfig cfg;
    cfg.bandwidth = h;
    *out = destim::kernel_eval(cfg, {x, len}, {y, len});
  });
}

destim_status destim_split_latent(const double* z, size_t m, size_t dim, size_t m1, uint64_t seed,
                                  double* z1_out, double* z2_out) {
  return guarded([&] {
    check_ptr(z, "z");
    check_ptr(z1_out, "z1_out");
    check_ptr(z2_out, "z2_out");
    destim::Matrix zm(m, dim, std::vector<double>(z, z + m * dim));
    auto [a, b] = destim::split_latent(zm, m1, seed);
    std::memcpy(z1_out, a.data().data(), a.data().size() * sizeof(double));
    std::memcpy(z2_out, b.data().data(), b.data().size() * sizeof(double));
  });
}

destim_maxcorr* destim_maxcorr_create(const double* x, size_t n, size_t x_dim, const double* z1,
                                      size_t m1, const double* z2, size_t m2, size_t z_dim,
                                      destim_transform_kind transform, double kernel_h) {
  return guarded_ptr([&]() -> destim_maxcorr* {
    check_ptr(x, "x");
    check_ptr(z1, "z1");
    check_ptr(z2, "z2");
    destim::MaxCorrProblem p;
    p.x_data = destim::Matrix(n, x_dim, std::vector<double>(x, x + n * x_dim));
    p.z_split_1 = destim::Matrix(m1, z_dim, std::vector<double>(z1, z1 + m1 * z_dim));
    p.z_split_2 = destim::Matrix(m2, z_dim, std::vector<double>(z2, z2 + m2 * z_dim));
    p.transform = destim::TransformSpec{to_transform(transform), z_dim, x_dim};
    p.kernel.bandwidth = kernel_h;
    p.validate();
    return new destim_maxcorr{std::move(p)};
  });
}

void destim_maxcorr_destroy(destim_maxcorr* mc) { delete mc; }

size_t destim_maxcorr_param_dim(const destim_maxcorr* mc) {
  return mc ? mc->problem.param_dim() : 0;
}

destim_status destim_maxcorr_objective(const destim_maxcorr* mc, const double* theta, size_t len,
                                       double* out) {
  return guarded([&] {
    check_ptr(mc, "problem");
    check_ptr(theta, "theta");
    check_ptr(out, "out");
    *out = destim::objective(mc->problem, {theta, len});
  });
}

destim_status destim_maxcorr_gradient(const destim_maxcorr* mc, const double* theta, size_t len,
                                      double* out) {
  return guarded([&] {
    check_ptr(mc, "problem");
    check_ptr(theta, "theta");
    check_ptr(out, "out");
    std::vector<double> g = destim::objective_gradient(mc->problem, {theta, len});
    std::memcpy(out, g.data(), g.size() * sizeof(double));
  });
}

void destim_optimizer_config_default(size_t param_dim, destim_optimizer_config* cfg) {
  if (!cfg) return;
  destim::OptimizerConfig d = destim::OptimizerConfig::defaults(param_dim);
  cfg->method = d.method == destim::OptMethod::grid_then_refine ? DESTIM_OPT_GRID_THEN_REFINE
                : d.method == destim::OptMethod::nelder_mead    ? DESTIM_OPT_NELDER_MEAD
                                                                : DESTIM_OPT_GRADIENT_ASCENT;
  cfg->restarts = d.restarts;
  cfg->max_iters = d.max_iters;
  cfg->step_scale = d.step_scale;
  cfg->tolerance = d.tolerance;
  cfg->seed = d.seed;
  cfg->init_lo = -10.0;
  cfg->init_hi = 10.0;
}

destim_status destim_maxcorr_estimate(const destim_maxcorr* mc,
                                      const destim_optimizer_config* cfg, double* theta_out,
                                      size_t theta_len, double* value_out) {
  return guarded([&] {
    check_ptr(mc, "problem");
    check_ptr(cfg, "optimizer config");
    check_ptr(theta_out, "theta_out");
    destim::require(theta_len == mc->problem.param_dim(), destim::Errc::dimension_mismatch,
                    "theta_out length != param_dim");
    destim::OptimizerConfig oc;
    switch (cfg->method) {
      case DESTIM_OPT_GRID_THEN_REFINE:
        oc.method = destim::OptMethod::grid_then_refine;
        break;
      case DESTIM_OPT_NELDER_MEAD:
        oc.method = destim::OptMethod::nelder_mead;
        break;
      case DESTIM_OPT_GRADIENT_ASCENT:
        oc.method = destim::OptMethod::gradient_ascent;
        break;
      default:
        destim::fail(destim::Errc::invalid_argument, "unknown optimizer method");
    }
    oc.restarts = cfg->restarts;
    oc.max_iters = cfg->max_iters;
    oc.step_scale = cfg->step_scale;
    oc.tolerance = cfg->tolerance;
    oc.seed = cfg->seed;
    oc.init_lo = {cfg->init_lo};
    oc.init_hi = {cfg->init_hi};
    destim::EstimateResult res = destim::estimate(mc->problem, oc);
    std::memcpy(theta_out, res.theta.data(), res.theta.size() * sizeof(double));
    if (value_out) *value_out = res.value;
  });
}

/* ---------------- baselines ---------------- */

destim_status destim_moment_matching(const double* x, size_t n, const double* z, size_t m,
                                     double* out) {
  return guarded([&] {
    check_ptr(x, "x");
    check_ptr(z, "z");
    check_ptr(out, "out");
    *out = destim::moment_matching({x, n}, {z, m});
  });
}

destim_status destim_mle_translation(const double* x, size_t n, const double* z, size_t m,
                                     destim_family family, double* out) {
  return guarded([&] {
    check_ptr(x, "x");
    check_ptr(z, "z");
    check_ptr(out, "out");
    *out = destim::mle_translation({x, n}, {z, m}, to_family(family));
  });
}

void destim_huber_config_default(destim_huber_config* cfg) {
  if (!cfg) return;
  destim::HuberConfig d;
  cfg->c = d.c;
  cfg->max_iters = d.max_iters;
  cfg->tolerance = d.tolerance;
}

namespace {
destim::HuberConfig to_huber(const destim_huber_config* cfg) {
  destim::HuberConfig out;
  if (cfg) {
    out.c = cfg->c;
    out.max_iters = static_cast<int>(cfg->max_iters);
    out.tolerance = cfg->tolerance;
  }
  return out;
}
}  // namespace

destim_status destim_huber_location(const double* data, size_t n, const destim_huber_config* cfg,
                                    double* out) {
  return guarded([&] {
    check_ptr(data, "data");
    check_ptr(out, "out");
    *out = destim::huber_location({data, n}, to_huber(cfg));
  });
}

destim_status destim_huber_translation(const double* x, size_t n, const double* z, size_t m,
                                       const destim_huber_config* cfg, double* out) {
  return guarded([&] {
    check_ptr(x, "x");
    check_ptr(z, "z");
    check_ptr(out, "out");
    *out = destim::huber_translation({x, n}, {z, m}, to_huber(cfg));
  });
}

/* ---------------- benchmark ---------------- */

void destim_bench_config_default(destim_bench_config* cfg) {
  if (!cfg) return;
  destim::ExperimentConfig d;
  cfg->family_mask = (1u << DESTIM_FAMILY_GAUSSIAN) | (1u << DESTIM_FAMILY_LAPLACE) |
                     (1u << DESTIM_FAMILY_CAUCHY);
  cfg->estimator_mask = (1u << DESTIM_EST_MLE) | (1u << DESTIM_EST_MOMENT_MATCHING) |
                        (1u << DESTIM_EST_HUBER) | (1u << DESTIM_EST_MAXCORR);
  cfg->theta_true = d.theta_true;
  cfg->mu_true = d.mu_true;
  cfg->n = d.n;
  cfg->m = d.m;
  cfg->m1 = d.m1;
  cfg->m2 = d.m2;
  cfg->trials = d.trials;
  cfg->maxcorr_trials = d.maxcorr_trials;
  cfg->huber_c = d.huber_c;
  cfg->kernel_h = d.kernel_h;
  cfg->master_seed = d.master_seed;
  cfg->workers = d.workers;
  cfg->init_lo = d.init_lo;
  cfg->init_hi = d.init_hi;
}

destim_status destim_bench_run(const destim_bench_config* cfg, destim_report** out) {
  return guarded([&] {
    check_ptr(out, "out");
    destim::ExperimentReport rep = destim::run_experiment(to_experiment_config(cfg));
    auto handle = std::make_unique<destim_report>();
    handle->text = destim::report_text(rep);
    handle->json = destim::report_to_json(rep).dump(2);
    handle->report = std::move(rep);
    *out = handle.release();
  });
}

void destim_report_destroy(destim_report* report) { delete report; }

const char* destim_report_text(const destim_report* report) {
  return report ? report->text.c_str() : "";
}

const char* destim_report_json(const destim_report* report) {
  return report ? report->json.c_str() : "";
}

destim_status destim_report_cell(const destim_report* report, destim_family family,
                                 destim_estimator estimator, double* error_power, int* divergent,
                                 double* std_error, uint64_t* trials, uint64_t* failed_trials,
                                 double* wall_seconds) {
  return guarded([&] {
    check_ptr(report, "report");
    const destim::CellReport* cell =
        report->report.find(to_family(family), to_estimator(estimator));
    destim::require(cell != nullptr, destim::Errc::invalid_argument,
                    "report has no cell for that family/estimator");
    if (error_power)
      *error_power = cell->divergent ? std::numeric_limits<double>::infinity() : cell->error_power;
    if (divergent) *divergent = cell->divergent ? 1 : 0;
    if (std_error) *std_error = cell->std_error;
    if (trials) *trials = cell->trials;
    if (failed_trials) *failed_trials = cell->failed_trials;
    if (wall_seconds) *wall_seconds = cell->wall_seconds;
  });
}

double destim_report_total_seconds(const destim_report* report) {
  return report ? report->report.total_wall_seconds : 0.0;
}

destim_status destim_bench_trial(const destim_bench_config* cfg, destim_family family,
                                 destim_estimator estimator, uint64_t trial_index,
                                 double* squared_error) {
  return guarded([&] {
    check_ptr(squared_error, "squared_error");
    destim::ExperimentConfig ec = to_experiment_config(cfg);
    destim::Family f = to_family(family);
    destim::EstimatorKind e = to_estimator(estimator);
    *squared_error = destim::run_trial(ec, f, e, destim::trial_seed(ec.master_seed, f, e,
                                                                    trial_index));
  });
}

} /* extern "C" */
