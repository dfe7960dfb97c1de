/*
 * destim — data-driven parameter estimation.
 *
 * C interface to the estimation core: base densities and information
 * quantities, parametric transformations, a trainable feedforward estimator,
 * likelihood-weighted Bayesian estimators, the kernel maximal-correlation
 * estimator, classical baselines, and a Monte Carlo benchmark harness.
 *
 * Conventions:
 *   - Objects are opaque handles created by *_create / destroyed by
 *     *_destroy. Creation returns NULL on failure.
 *   - Fallible calls return destim_status; on failure destim_last_error()
 *     holds a thread-local message describing the problem.
 *   - Vectors and row-major matrices are passed as double* plus lengths.
 *   - Every randomized routine takes an explicit 64-bit seed and is
 *     deterministic given it.
 */

#ifndef DESTIM_H
#define DESTIM_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum destim_status {
  DESTIM_OK = 0,
  DESTIM_ERR_INVALID_ARGUMENT = 1,
  DESTIM_ERR_DIMENSION_MISMATCH = 2,
  DESTIM_ERR_DEGENERATE_WEIGHTS = 3,
  DESTIM_ERR_NO_CONVERGENCE = 4,
  DESTIM_ERR_DIVERGED = 5,
  DESTIM_ERR_IO = 6,
  DESTIM_ERR_PARSE = 7
} destim_status;

/* Message for the most recent failing call on this thread; never NULL. */
const char* destim_last_error(void);

const char* destim_version(void);

/* ------------------------------------------------------------------ */
/* Base densities                                                      */

typedef enum destim_family {
  DESTIM_FAMILY_GAUSSIAN = 0,
  DESTIM_FAMILY_LAPLACE = 1,
  DESTIM_FAMILY_CAUCHY = 2
} destim_family;

typedef struct destim_distribution destim_distribution;

/* Unit-scale base density shifted by `location`. */
destim_distribution* destim_distribution_create(destim_family family, double location);
void destim_distribution_destroy(destim_distribution* d);

/* `count` i.i.d. draws into out[0..count). */
destim_status destim_distribution_sample(const destim_distribution* d, uint64_t seed, size_t count,
                                         double* out);
destim_status destim_distribution_log_density(const destim_distribution* d, double w, double* out);
/* d/dw of the log density; the Laplace kink returns the subgradient value 0. */
destim_status destim_distribution_score(const destim_distribution* d, double w, double* out);
destim_status destim_distribution_fisher_information(const destim_distribution* d, double* out);
/* Writes +infinity and sets *is_infinite for the Cauchy family. */
destim_status destim_distribution_variance(const destim_distribution* d, double* out,
                                           int* is_infinite);

/* Two-dataset translation bound (1/fi)(1/n + 1/m). */
destim_status destim_crlb(double fisher_information, uint64_t n, uint64_t m, double* out);

/* ------------------------------------------------------------------ */
/* Parametric transformations T(z, theta)                              */

typedef enum destim_transform_kind {
  DESTIM_TRANSFORM_TRANSLATION = 0,    /* z + theta            */
  DESTIM_TRANSFORM_ELEMENTWISE_SCALE = 1, /* theta (*) z       */
  DESTIM_TRANSFORM_MATRIX = 2          /* Theta z, row-major   */
} destim_transform_kind;

typedef struct destim_transform destim_transform;

destim_transform* destim_transform_create(destim_transform_kind kind, size_t input_dim,
                                          size_t output_dim);
void destim_transform_destroy(destim_transform* t);
size_t destim_transform_param_dim(const destim_transform* t);
size_t destim_transform_output_dim(const destim_transform* t);

destim_status destim_transform_apply(const destim_transform* t, const double* z, size_t z_len,
                                     const double* theta, size_t theta_len, double* out,
                                     size_t out_len);
/* dT/dtheta into out[0..output_dim*param_dim), row-major. */
destim_status destim_transform_jacobian(const destim_transform* t, const double* z, size_t z_len,
                                        const double* theta, size_t theta_len, double* out,
                                        size_t out_len);

/* ------------------------------------------------------------------ */
/* Costs                                                               */

typedef enum destim_cost {
  DESTIM_COST_SQUARED_ERROR = 0,
  DESTIM_COST_ABSOLUTE_ERROR = 1
} destim_cost;

destim_status destim_cost_eval(destim_cost kind, const double* u, const double* theta, size_t len,
                               double* out);
destim_status destim_cost_grad(destim_cost kind, const double* u, const double* theta, size_t len,
                               double* out);

/* ------------------------------------------------------------------ */
/* Neural estimator                                                    */

typedef enum destim_activation {
  DESTIM_ACTIVATION_RELU = 0,
  DESTIM_ACTIVATION_TANH = 1
} destim_activation;

typedef struct destim_net destim_net;

/* layer_sizes[0] is the input dimension, layer_sizes[n_layers-1] the output
 * dimension. Weights are seeded uniform draws, biases start at zero. */
destim_net* destim_net_create(const size_t* layer_sizes, size_t n_layers,
                              destim_activation activation, uint64_t init_seed);
void destim_net_destroy(destim_net* net);

size_t destim_net_param_count(const destim_net* net);
size_t destim_net_input_dim(const destim_net* net);
size_t destim_net_output_dim(const destim_net* net);
destim_status destim_net_get_params(const destim_net* net, double* out, size_t len);
destim_status destim_net_set_params(destim_net* net, const double* values, size_t len);

destim_status destim_net_forward(const destim_net* net, const double* x, size_t x_len, double* out,
                                 size_t out_len);
/* Gradient of C(u(x, alpha), theta) with respect to alpha (backpropagation). */
destim_status destim_net_grad(const destim_net* net, destim_cost cost, const double* x,
                              size_t x_len, const double* theta, size_t theta_len, double* out,
                              size_t out_len);
destim_status destim_net_sgd_step(destim_net* net, double learning_rate, destim_cost cost,
                                  const double* x, size_t x_len, const double* theta,
                                  size_t theta_len);

typedef struct destim_train_config {
  double learning_rate;
  uint64_t max_epochs;
  int full_gradient;       /* 0 = stochastic per-pair updates */
  int shuffle_each_epoch;
  uint64_t seed;
  double early_stop_tolerance; /* relative epoch-loss change */
  destim_cost cost;
} destim_train_config;

void destim_train_config_default(destim_train_config* cfg);

typedef struct destim_train_summary {
  double final_loss;
  uint64_t epochs_run;
  int early_stopped;
} destim_train_summary;

/* Trains `net` in place on n_pairs rows of (x, theta). `loss_trace`, when
 * non-NULL, receives up to *trace_len entries (element 0 is the initial
 * loss); *trace_len is updated to the number written. Returns
 * DESTIM_ERR_DIVERGED when the epoch loss blows past 10x the initial loss. */
destim_status destim_net_train(destim_net* net, const destim_train_config* cfg, const double* x,
                               size_t x_dim, const double* theta, size_t theta_dim, size_t n_pairs,
                               double* loss_trace, size_t* trace_len,
                               destim_train_summary* summary);

/* Trains `restarts` independently initialized nets and returns the one with
 * the best final loss; NULL on failure. */
destim_net* destim_net_train_restarts(const size_t* layer_sizes, size_t n_layers,
                                      destim_activation activation,
                                      const destim_train_config* cfg, const double* x,
                                      size_t x_dim, const double* theta, size_t theta_dim,
                                      size_t n_pairs, size_t restarts,
                                      destim_train_summary* summary);

/* JSON model document: layer sizes, activation name, full-precision params. */
destim_status destim_net_save(const destim_net* net, const char* path);
destim_net* destim_net_load(const char* path);

/* ------------------------------------------------------------------ */
/* Likelihood-weighted Bayesian estimators                             */

typedef struct destim_likelihood destim_likelihood;

/* log f(X|theta) callback for custom models. */
typedef double (*destim_loglik_fn)(const double* x, size_t x_len, const double* theta,
                                   size_t theta_len, void* ctx);

/* Translation model f(X|theta) = prod_j g0(x_j - mu - theta_j); x may carry
 * several i.i.d. rows of `dim` values. */
destim_likelihood* destim_likelihood_translation(destim_family family, double mu, size_t dim);
destim_likelihood* destim_likelihood_custom(destim_loglik_fn fn, void* ctx, size_t theta_dim);
void destim_likelihood_destroy(destim_likelihood* lik);

/* priors is n_priors x theta_dim row-major. */
destim_status destim_bayes_mmse(const destim_likelihood* lik, const double* x, size_t x_len,
                                const double* priors, size_t n_priors, size_t theta_dim,
                                double* out);
destim_status destim_bayes_mmae(const destim_likelihood* lik, const double* x, size_t x_len,
                                const double* priors, size_t n_priors, size_t theta_dim,
                                double* out);

/* Stochastic per-sample iteration from u0; `decay` enables the
 * mu/(1 + t/n) schedule. Sets *degenerate when every weight underflows (u0
 * is returned unchanged). */
destim_status destim_bayes_sgd(const destim_likelihood* lik, const double* x, size_t x_len,
                               const double* priors, size_t n_priors, size_t theta_dim,
                               destim_cost cost, double mu, int decay, size_t sweeps,
                               uint64_t seed, const double* u0, double* out, int* degenerate);

/* Full-batch iteration from u0 until the step norm drops below `tolerance`.
 * On DESTIM_ERR_NO_CONVERGENCE `out` still holds the last iterate. */
destim_status destim_bayes_gd(const destim_likelihood* lik, const double* x, size_t x_len,
                              const double* priors, size_t n_priors, size_t theta_dim,
                              destim_cost cost, double mu, size_t max_iters, double tolerance,
                              const double* u0, double* out, size_t* iterations);

/* ------------------------------------------------------------------ */
/* Maximal correlation estimator                                       */

typedef struct destim_maxcorr destim_maxcorr;

/* Gaussian kernel exp(-||x-y||^2 / h). */
destim_status destim_kernel_eval(double h, const double* x, const double* y, size_t len,
                                 double* out);

/* Seeded shuffle then disjoint split of an m x dim dataset into m1 and m-m1
 * rows. */
destim_status destim_split_latent(const double* z, size_t m, size_t dim, size_t m1, uint64_t seed,
                                  double* z1_out, double* z2_out);

destim_maxcorr* destim_maxcorr_create(const double* x, size_t n, size_t x_dim, const double* z1,
                                      size_t m1, const double* z2, size_t m2, size_t z_dim,
                                      destim_transform_kind transform, double kernel_h);
void destim_maxcorr_destroy(destim_maxcorr* mc);
size_t destim_maxcorr_param_dim(const destim_maxcorr* mc);

/* The ratio N1(theta) N2(theta) / D(theta) of kernel double sums. */
destim_status destim_maxcorr_objective(const destim_maxcorr* mc, const double* theta, size_t len,
                                       double* out);
destim_status destim_maxcorr_gradient(const destim_maxcorr* mc, const double* theta, size_t len,
                                      double* out);

typedef enum destim_opt_method {
  DESTIM_OPT_GRID_THEN_REFINE = 0, /* scalar theta only */
  DESTIM_OPT_NELDER_MEAD = 1,
  DESTIM_OPT_GRADIENT_ASCENT = 2
} destim_opt_method;

typedef struct destim_optimizer_config {
  destim_opt_method method;
  size_t restarts;
  size_t max_iters;
  double step_scale;
  double tolerance;
  uint64_t seed;
  double init_lo; /* search box, broadcast per coordinate */
  double init_hi;
} destim_optimizer_config;

/* Grid+refine for scalar parameters, Nelder-Mead with 5 restarts otherwise;
 * box [-10, 10]. */
void destim_optimizer_config_default(size_t param_dim, destim_optimizer_config* cfg);

/* Best theta over all restarts; value_out (optional) receives the objective
 * there. */
destim_status destim_maxcorr_estimate(const destim_maxcorr* mc,
                                      const destim_optimizer_config* cfg, double* theta_out,
                                      size_t theta_len, double* value_out);

/* ------------------------------------------------------------------ */
/* Baselines                                                           */

destim_status destim_moment_matching(const double* x, size_t n, const double* z, size_t m,
                                     double* out);
destim_status destim_mle_translation(const double* x, size_t n, const double* z, size_t m,
                                     destim_family family, double* out);

typedef struct destim_huber_config {
  double c;
  size_t max_iters;
  double tolerance;
} destim_huber_config;

void destim_huber_config_default(destim_huber_config* cfg);

destim_status destim_huber_location(const double* data, size_t n, const destim_huber_config* cfg,
                                    double* out);
destim_status destim_huber_translation(const double* x, size_t n, const double* z, size_t m,
                                       const destim_huber_config* cfg, double* out);

/* ------------------------------------------------------------------ */
/* Monte Carlo benchmark                                               */

typedef enum destim_estimator {
  DESTIM_EST_MLE = 0,
  DESTIM_EST_MOMENT_MATCHING = 1,
  DESTIM_EST_HUBER = 2,
  DESTIM_EST_MAXCORR = 3
} destim_estimator;

typedef struct destim_bench_config {
  uint32_t family_mask;    /* bit (1 << destim_family) selects a column */
  uint32_t estimator_mask; /* bit (1 << destim_estimator) selects a row  */
  double theta_true;
  double mu_true;
  size_t n, m, m1, m2;
  size_t trials;
  size_t maxcorr_trials; /* 0 = same as trials */
  double huber_c;
  double kernel_h;
  uint64_t master_seed;
  unsigned workers; /* 0 = hardware concurrency */
  double init_lo;   /* maxcorr search box */
  double init_hi;
} destim_bench_config;

void destim_bench_config_default(destim_bench_config* cfg);

typedef struct destim_report destim_report;

destim_status destim_bench_run(const destim_bench_config* cfg, destim_report** out);
void destim_report_destroy(destim_report* report);

/* Borrowed strings, valid until the report is destroyed. */
const char* destim_report_text(const destim_report* report);
const char* destim_report_json(const destim_report* report);

/* Any out pointer may be NULL. Divergent cells report error_power as
 * +infinity with *divergent set. */
destim_status destim_report_cell(const destim_report* report, destim_family family,
                                 destim_estimator estimator, double* error_power, int* divergent,
                                 double* std_error, uint64_t* trials, uint64_t* failed_trials,
                                 double* wall_seconds);
double destim_report_total_seconds(const destim_report* report);

/* One benchmark trial (fresh data draw + estimate); returns the squared
 * error. The per-trial stream is derived injectively from
 * (master_seed, family, estimator, index). */
destim_status destim_bench_trial(const destim_bench_config* cfg, destim_family family,
                                 destim_estimator estimator, uint64_t trial_index,
                                 double* squared_error);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* DESTIM_H */
