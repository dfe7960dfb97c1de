// destim command line: dataset generation, single-shot estimation, neural
// training, and the Monte Carlo benchmark. Talks to the library exclusively
// through the C API in destim/destim.h.

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "csv.hpp"
#include "destim/destim.h"

namespace {

using destim_cli::Csv;
using destim_cli::comment_size_value;
using destim_cli::format_double;
using destim_cli::read_csv;
using destim_cli::write_csv;

constexpr int kExitUsage = 1;
constexpr int kExitEstimation = 2;
constexpr int kExitTrainingDiverged = 3;

struct CliError : std::runtime_error {
  CliError(int code, const std::string& msg) : std::runtime_error(msg), exit_code(code) {}
  int exit_code;
};

[[noreturn]] void die(int code, const std::string& msg) { throw CliError(code, msg); }

std::string last_error() { return destim_last_error(); }

/// Estimator-level failures map to exit 2; everything else is bad input.
void check_estimate(destim_status st) {
  if (st == DESTIM_OK) return;
  switch (st) {
    case DESTIM_ERR_DEGENERATE_WEIGHTS:
    case DESTIM_ERR_NO_CONVERGENCE:
    case DESTIM_ERR_DIVERGED:
      die(kExitEstimation, "estimation failed: " + last_error());
    default:
      die(kExitUsage, last_error());
  }
}

void check_input(destim_status st) {
  if (st != DESTIM_OK) die(kExitUsage, last_error());
}

std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t stream_seed(std::uint64_t seed, std::uint64_t key) {
  return mix64(mix64(seed) + key);
}

destim_family parse_family_or_die(const std::string& name) {
  if (name == "gaussian") return DESTIM_FAMILY_GAUSSIAN;
  if (name == "laplace") return DESTIM_FAMILY_LAPLACE;
  if (name == "cauchy") return DESTIM_FAMILY_CAUCHY;
  die(kExitUsage, "unknown family '" + name + "' (expected gaussian|laplace|cauchy)");
}

destim_transform_kind parse_transform_or_die(const std::string& name) {
  if (name == "translation") return DESTIM_TRANSFORM_TRANSLATION;
  if (name == "scale") return DESTIM_TRANSFORM_ELEMENTWISE_SCALE;
  if (name == "matrix") return DESTIM_TRANSFORM_MATRIX;
  die(kExitUsage, "unknown transform '" + name + "' (expected translation|scale|matrix)");
}

destim_cost parse_cost_or_die(const std::string& name) {
  if (name == "mse") return DESTIM_COST_SQUARED_ERROR;
  if (name == "mae") return DESTIM_COST_ABSOLUTE_ERROR;
  if (name == "map")
    die(kExitUsage,
        "the MAP indicator cost is not supported: its gradient is 0 away from the boundary and "
        "infinite on it, so no gradient-based scheme applies; use mse or mae");
  die(kExitUsage, "unknown cost '" + name + "' (expected mse|mae)");
}

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

std::vector<double> parse_doubles_or_die(const std::string& text, const std::string& what) {
  std::vector<double> out;
  for (const std::string& item : split_list(text)) {
    try {
      out.push_back(std::stod(item));
    } catch (...) {
      die(kExitUsage, "cannot parse " + what + " value '" + item + "'");
    }
  }
  if (out.empty()) die(kExitUsage, what + " must contain at least one value");
  return out;
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out.good()) die(kExitUsage, "cannot open file for writing: " + path);
  out << text;
  if (!out.good()) die(kExitUsage, "failed writing file: " + path);
}

struct DistributionHandle {
  destim_distribution* p = nullptr;
  ~DistributionHandle() { destim_distribution_destroy(p); }
};

struct TransformHandle {
  destim_transform* p = nullptr;
  ~TransformHandle() { destim_transform_destroy(p); }
};

/* ------------------------------------------------------------------ */
/* gen-data                                                            */

struct GenOpts {
  std::string family = "gaussian";
  std::string transform = "translation";
  std::string theta = "1";
  double mu = 1.0;
  std::size_t dim = 1;
  std::size_t n = 100;
  std::size_t m = 100;
  std::uint64_t seed = 1;
  std::string out = ".";
  bool paired = false;
};

std::vector<double> sample_block(destim_family family, double location, std::uint64_t seed,
                                 std::size_t count) {
  DistributionHandle d{destim_distribution_create(family, location)};
  if (!d.p) die(kExitUsage, last_error());
  std::vector<double> values(count);
  check_input(destim_distribution_sample(d.p, seed, count, values.data()));
  return values;
}

void run_gen_data(const GenOpts& opt) {
  destim_family family = parse_family_or_die(opt.family);
  destim_transform_kind tkind = parse_transform_or_die(opt.transform);
  std::vector<double> theta = parse_doubles_or_die(opt.theta, "--theta");

  std::size_t out_dim = opt.dim;
  if (tkind == DESTIM_TRANSFORM_MATRIX) {
    if (theta.size() % opt.dim != 0)
      die(kExitUsage, "matrix transform needs --theta length to be a multiple of --dim");
    out_dim = theta.size() / opt.dim;
  } else if (theta.size() != opt.dim) {
    die(kExitUsage, "--theta length must equal --dim for translation/scale transforms");
  }

  TransformHandle tf{destim_transform_create(tkind, opt.dim, out_dim)};
  if (!tf.p) die(kExitUsage, last_error());

  std::string base_meta = "family=" + opt.family + " mu=" + format_double(opt.mu) +
                          " transform=" + opt.transform + " dim=" + std::to_string(opt.dim) +
                          " seed=" + std::to_string(opt.seed);

  if (opt.paired) {
    // Bayesian pairs: theta_i from the base prior, X_i = T(Z_i, theta_i).
    std::size_t pdim = destim_transform_param_dim(tf.p);
    std::vector<double> thetas = sample_block(family, 0.0, stream_seed(opt.seed, 0), opt.n * pdim);
    std::vector<double> latent =
        sample_block(family, opt.mu, stream_seed(opt.seed, 1), opt.n * opt.dim);
    std::vector<double> rows(opt.n * (out_dim + pdim));
    for (std::size_t i = 0; i < opt.n; ++i) {
      check_input(destim_transform_apply(tf.p, latent.data() + i * opt.dim, opt.dim,
                                         thetas.data() + i * pdim, pdim,
                                         rows.data() + i * (out_dim + pdim), out_dim));
      std::copy(thetas.begin() + i * pdim, thetas.begin() + (i + 1) * pdim,
                rows.begin() + i * (out_dim + pdim) + out_dim);
    }
    std::string path = opt.out + "/paired.csv";
    write_csv(path,
              {"destim gen-data --paired", base_meta + " n=" + std::to_string(opt.n),
               "x_dim=" + std::to_string(out_dim) + " theta_dim=" + std::to_string(pdim)},
              rows.data(), opt.n, out_dim + pdim);
    std::cout << "wrote " << path << " (" << opt.n << " pairs)\n";
    return;
  }

  std::string theta_meta;
  for (std::size_t i = 0; i < theta.size(); ++i)
    theta_meta += (i ? "," : "") + format_double(theta[i]);

  // Z follows g0(. - mu); X applies the transform to fresh latent draws.
  std::vector<double> z = sample_block(family, opt.mu, stream_seed(opt.seed, 2), opt.m * opt.dim);
  std::vector<double> latent =
      sample_block(family, opt.mu, stream_seed(opt.seed, 3), opt.n * opt.dim);
  std::vector<double> x(opt.n * out_dim);
  for (std::size_t i = 0; i < opt.n; ++i)
    check_input(destim_transform_apply(tf.p, latent.data() + i * opt.dim, opt.dim, theta.data(),
                                       theta.size(), x.data() + i * out_dim, out_dim));

  std::string xpath = opt.out + "/x.csv";
  std::string zpath = opt.out + "/z.csv";
  write_csv(xpath,
            {"destim gen-data (observed)",
             base_meta + " theta=" + theta_meta + " n=" + std::to_string(opt.n)},
            x.data(), opt.n, out_dim);
  write_csv(zpath, {"destim gen-data (latent)", base_meta + " m=" + std::to_string(opt.m)},
            z.data(), opt.m, opt.dim);
  std::cout << "wrote " << xpath << " (" << opt.n << " rows), " << zpath << " (" << opt.m
            << " rows)\n";
}

/* ------------------------------------------------------------------ */
/* estimate                                                            */

struct EstimateOpts {
  std::string method;
  std::string x_path;
  std::string z_path;
  std::string z1_path;
  std::string z2_path;
  std::string prior_path;
  std::string family = "gaussian";
  double mu = 0.0;
  std::string transform = "translation";
  std::size_t m1 = 0;  // 0 = half
  double kernel_h = 1.0;
  double huber_c = 1.0;
  std::uint64_t seed = 1;
  std::string optimizer = "auto";
  std::size_t restarts = 0;  // 0 = method default
  std::size_t max_iters = 0;
  double tolerance = 0.0;
  double init_lo = -10.0;
  double init_hi = 10.0;
  std::string solver = "closed";  // mmse/mmae: closed | gd | sgd
  double iter_mu = 0.05;
  std::size_t gd_iters = 200000;
  double gd_tol = 1e-10;
  std::size_t sgd_sweeps = 2000;
  std::string out;
};

std::vector<double> require_scalar_column(const Csv& csv, const std::string& what) {
  if (csv.cols != 1)
    die(kExitUsage, what + " must have exactly one column for this method (found " +
                        std::to_string(csv.cols) + ")");
  return csv.values;
}

void emit_estimate(const EstimateOpts& opt, nlohmann::ordered_json doc) {
  std::string line = "theta_hat =";
  for (const auto& v : doc.at("theta_hat")) line += " " + format_double(v.get<double>());
  std::cout << line << '\n';
  if (doc.contains("objective"))
    std::cout << "objective = " << format_double(doc.at("objective").get<double>()) << '\n';
  if (!opt.out.empty()) write_text_file(opt.out, doc.dump(2) + "\n");
}

void run_estimate(const EstimateOpts& opt) {
  nlohmann::ordered_json doc;
  doc["method"] = opt.method;

  if (opt.method == "map")
    die(kExitUsage,
        "MAP estimation is not supported: the indicator cost has gradient 0 away from the "
        "boundary and infinite on it; available methods: maxcorr mle moment huber mmse mmae");

  if (opt.method == "moment" || opt.method == "mle" || opt.method == "huber") {
    if (opt.x_path.empty() || opt.z_path.empty())
      die(kExitUsage, "--x and --z are required for method '" + opt.method + "'");
    std::vector<double> x = require_scalar_column(read_csv(opt.x_path), "--x data");
    std::vector<double> z = require_scalar_column(read_csv(opt.z_path), "--z data");
    double theta_hat = 0.0;
    if (opt.method == "moment") {
      check_estimate(destim_moment_matching(x.data(), x.size(), z.data(), z.size(), &theta_hat));
    } else if (opt.method == "mle") {
      destim_family family = parse_family_or_die(opt.family);
      check_estimate(
          destim_mle_translation(x.data(), x.size(), z.data(), z.size(), family, &theta_hat));
      doc["family"] = opt.family;
    } else {
      destim_huber_config hc;
      destim_huber_config_default(&hc);
      hc.c = opt.huber_c;
      check_estimate(
          destim_huber_translation(x.data(), x.size(), z.data(), z.size(), &hc, &theta_hat));
      doc["huber_c"] = opt.huber_c;
    }
    doc["theta_hat"] = {theta_hat};
    emit_estimate(opt, std::move(doc));
    return;
  }

  if (opt.method == "mmse" || opt.method == "mmae") {
    if (opt.x_path.empty() || opt.prior_path.empty())
      die(kExitUsage, "--x and --prior are required for method '" + opt.method + "'");
    Csv x = read_csv(opt.x_path);
    Csv prior = read_csv(opt.prior_path);
    std::size_t dim = prior.cols;
    if (x.cols != dim)
      die(kExitUsage, "--x column count must match the prior dimension for the translation model");
    destim_family family = parse_family_or_die(opt.family);
    destim_likelihood* lik = destim_likelihood_translation(family, opt.mu, dim);
    if (!lik) die(kExitUsage, last_error());
    std::unique_ptr<destim_likelihood, decltype(&destim_likelihood_destroy)> guard(
        lik, destim_likelihood_destroy);

    destim_cost cost =
        opt.method == "mmse" ? DESTIM_COST_SQUARED_ERROR : DESTIM_COST_ABSOLUTE_ERROR;
    std::vector<double> theta_hat(dim, 0.0);
    if (opt.solver == "closed") {
      auto fn = opt.method == "mmse" ? destim_bayes_mmse : destim_bayes_mmae;
      check_estimate(fn(lik, x.values.data(), x.values.size(), prior.values.data(), prior.rows,
                        dim, theta_hat.data()));
    } else {
      // Iterative solvers start from the prior sample mean.
      std::vector<double> u0(dim, 0.0);
      for (std::size_t i = 0; i < prior.rows; ++i)
        for (std::size_t j = 0; j < dim; ++j) u0[j] += prior.values[i * dim + j];
      for (double& v : u0) v /= static_cast<double>(prior.rows);
      if (opt.solver == "gd") {
        std::size_t iters = 0;
        check_estimate(destim_bayes_gd(lik, x.values.data(), x.values.size(),
                                       prior.values.data(), prior.rows, dim, cost, opt.iter_mu,
                                       opt.gd_iters, opt.gd_tol, u0.data(), theta_hat.data(),
                                       &iters));
        doc["iterations"] = iters;
      } else if (opt.solver == "sgd") {
        int degenerate = 0;
        check_estimate(destim_bayes_sgd(lik, x.values.data(), x.values.size(),
                                        prior.values.data(), prior.rows, dim, cost, opt.iter_mu,
                                        /*decay=*/1, opt.sgd_sweeps, opt.seed, u0.data(),
                                        theta_hat.data(), &degenerate));
        if (degenerate)
          std::cerr << "warning: all likelihood weights vanished; returning the start point\n";
        doc["degenerate_weights"] = degenerate != 0;
      } else {
        die(kExitUsage, "unknown --solver '" + opt.solver + "' (expected closed|gd|sgd)");
      }
      doc["solver"] = opt.solver;
    }
    doc["family"] = opt.family;
    doc["mu"] = opt.mu;
    doc["theta_hat"] = theta_hat;
    emit_estimate(opt, std::move(doc));
    return;
  }

  if (opt.method == "maxcorr") {
    if (opt.x_path.empty()) die(kExitUsage, "--x is required for method 'maxcorr'");
    bool have_splits = !opt.z1_path.empty() || !opt.z2_path.empty();
    if (have_splits && (opt.z1_path.empty() || opt.z2_path.empty()))
      die(kExitUsage, "--z1 and --z2 must be given together");
    if (!have_splits && opt.z_path.empty())
      die(kExitUsage, "provide either --z (seeded split) or both --z1 and --z2");

    Csv x = read_csv(opt.x_path);
    std::vector<double> z1, z2;
    std::size_t m1 = 0, m2 = 0, zdim = 0;
    if (have_splits) {
      Csv a = read_csv(opt.z1_path);
      Csv b = read_csv(opt.z2_path);
      if (a.cols != b.cols) die(kExitUsage, "--z1 and --z2 column counts differ");
      z1 = a.values;
      z2 = b.values;
      m1 = a.rows;
      m2 = b.rows;
      zdim = a.cols;
    } else {
      Csv z = read_csv(opt.z_path);
      zdim = z.cols;
      m1 = opt.m1 != 0 ? opt.m1 : z.rows / 2;
      if (m1 == 0 || m1 >= z.rows)
        die(kExitUsage, "--m1 must be in [1, rows) of the --z dataset");
      m2 = z.rows - m1;
      z1.resize(m1 * zdim);
      z2.resize(m2 * zdim);
      check_input(destim_split_latent(z.values.data(), z.rows, zdim, m1,
                                      stream_seed(opt.seed, 10), z1.data(), z2.data()));
    }

    destim_transform_kind tkind = parse_transform_or_die(opt.transform);
    destim_maxcorr* mc = destim_maxcorr_create(x.values.data(), x.rows, x.cols, z1.data(), m1,
                                               z2.data(), m2, zdim, tkind, opt.kernel_h);
    if (!mc) die(kExitUsage, last_error());
    std::unique_ptr<destim_maxcorr, decltype(&destim_maxcorr_destroy)> guard(
        mc, destim_maxcorr_destroy);

    std::size_t pdim = destim_maxcorr_param_dim(mc);
    destim_optimizer_config oc;
    destim_optimizer_config_default(pdim, &oc);
    if (opt.optimizer == "grid") {
      oc.method = DESTIM_OPT_GRID_THEN_REFINE;
    } else if (opt.optimizer == "neldermead") {
      oc.method = DESTIM_OPT_NELDER_MEAD;
    } else if (opt.optimizer == "gradient") {
      oc.method = DESTIM_OPT_GRADIENT_ASCENT;
    } else if (opt.optimizer != "auto") {
      die(kExitUsage, "unknown --optimizer '" + opt.optimizer +
                          "' (expected auto|grid|neldermead|gradient)");
    }
    if (opt.restarts != 0) oc.restarts = opt.restarts;
    if (opt.max_iters != 0) oc.max_iters = opt.max_iters;
    if (opt.tolerance != 0.0) oc.tolerance = opt.tolerance;
    oc.seed = stream_seed(opt.seed, 11);
    oc.init_lo = opt.init_lo;
    oc.init_hi = opt.init_hi;

    std::vector<double> theta_hat(pdim, 0.0);
    double value = 0.0;
    check_estimate(destim_maxcorr_estimate(mc, &oc, theta_hat.data(), pdim, &value));
    doc["transform"] = opt.transform;
    doc["kernel_h"] = opt.kernel_h;
    doc["m1"] = m1;
    doc["m2"] = m2;
    doc["theta_hat"] = theta_hat;
    doc["objective"] = value;
    emit_estimate(opt, std::move(doc));
    return;
  }

  die(kExitUsage, "unknown --method '" + opt.method +
                      "' (expected maxcorr|mle|moment|huber|mmse|mmae)");
}

/* ------------------------------------------------------------------ */
/* train                                                               */

struct TrainOpts {
  std::string data;
  std::string hidden = "32";
  std::string activation = "tanh";
  std::string cost = "mse";
  double learning_rate = 0.01;
  std::size_t epochs = 100;
  std::string batch = "sgd";
  bool no_shuffle = false;
  double early_stop = 1e-8;
  std::size_t restarts = 1;
  std::uint64_t seed = 1;
  std::size_t x_dim = 0;
  std::size_t theta_dim = 0;
  std::string out = "model.json";
  std::string trace_path;
  std::string eval_path;
};

struct PairedData {
  std::size_t x_dim = 0;
  std::size_t theta_dim = 0;
  std::vector<double> x;
  std::vector<double> theta;
  std::size_t rows = 0;
};

PairedData load_paired(const std::string& path, std::size_t x_dim_flag,
                       std::size_t theta_dim_flag) {
  Csv csv = read_csv(path);
  PairedData data;
  data.x_dim = x_dim_flag != 0 ? x_dim_flag : comment_size_value(csv.comments, "x_dim").value_or(0);
  data.theta_dim =
      theta_dim_flag != 0 ? theta_dim_flag : comment_size_value(csv.comments, "theta_dim").value_or(0);
  if (data.x_dim == 0 || data.theta_dim == 0)
    die(kExitUsage, path +
                        ": column split not declared; add '# x_dim=<k> theta_dim=<k>' to the "
                        "header or pass --x-dim/--theta-dim");
  if (csv.cols != data.x_dim + data.theta_dim)
    die(kExitUsage, path + ": expected " + std::to_string(data.x_dim + data.theta_dim) +
                        " columns (x_dim + theta_dim), found " + std::to_string(csv.cols));
  data.rows = csv.rows;
  data.x.resize(csv.rows * data.x_dim);
  data.theta.resize(csv.rows * data.theta_dim);
  for (std::size_t i = 0; i < csv.rows; ++i) {
    const double* row = csv.values.data() + i * csv.cols;
    std::copy(row, row + data.x_dim, data.x.begin() + i * data.x_dim);
    std::copy(row + data.x_dim, row + csv.cols, data.theta.begin() + i * data.theta_dim);
  }
  return data;
}

double eval_mse(destim_net* net, const PairedData& data) {
  std::vector<double> u(data.theta_dim);
  double acc = 0.0;
  for (std::size_t i = 0; i < data.rows; ++i) {
    check_input(destim_net_forward(net, data.x.data() + i * data.x_dim, data.x_dim, u.data(),
                                   u.size()));
    double c = 0.0;
    check_input(destim_cost_eval(DESTIM_COST_SQUARED_ERROR, u.data(),
                                 data.theta.data() + i * data.theta_dim, data.theta_dim, &c));
    acc += c;
  }
  return acc / static_cast<double>(data.rows);
}

void run_train(const TrainOpts& opt) {
  PairedData data = load_paired(opt.data, opt.x_dim, opt.theta_dim);

  destim_activation act;
  if (opt.activation == "tanh") {
    act = DESTIM_ACTIVATION_TANH;
  } else if (opt.activation == "relu") {
    act = DESTIM_ACTIVATION_RELU;
  } else {
    die(kExitUsage, "unknown --activation '" + opt.activation + "' (expected tanh|relu)");
  }

  std::vector<std::size_t> sizes{data.x_dim};
  if (opt.hidden != "none") {
    for (const std::string& item : split_list(opt.hidden)) {
      try {
        std::size_t width = std::stoull(item);
        if (width == 0) throw std::invalid_argument("zero");
        sizes.push_back(width);
      } catch (...) {
        die(kExitUsage, "cannot parse --hidden value '" + item + "'");
      }
    }
  }
  sizes.push_back(data.theta_dim);

  destim_train_config cfg;
  destim_train_config_default(&cfg);
  cfg.learning_rate = opt.learning_rate;
  cfg.max_epochs = opt.epochs;
  cfg.full_gradient = opt.batch == "full" ? 1 : 0;
  if (opt.batch != "full" && opt.batch != "sgd")
    die(kExitUsage, "unknown --batch '" + opt.batch + "' (expected sgd|full)");
  cfg.shuffle_each_epoch = opt.no_shuffle ? 0 : 1;
  cfg.seed = opt.seed;
  cfg.early_stop_tolerance = opt.early_stop;
  cfg.cost = parse_cost_or_die(opt.cost);

  destim_net* net = nullptr;
  destim_train_summary summary{};
  std::vector<double> trace;
  if (opt.restarts <= 1) {
    net = destim_net_create(sizes.data(), sizes.size(), act, stream_seed(opt.seed, 20));
    if (!net) die(kExitUsage, last_error());
    trace.resize(opt.epochs + 1);
    std::size_t trace_len = trace.size();
    destim_status st = destim_net_train(net, &cfg, data.x.data(), data.x_dim, data.theta.data(),
                                        data.theta_dim, data.rows, trace.data(), &trace_len,
                                        &summary);
    if (st == DESTIM_ERR_DIVERGED) {
      destim_net_destroy(net);
      die(kExitTrainingDiverged, "training diverged: " + last_error());
    }
    if (st != DESTIM_OK) {
      destim_net_destroy(net);
      die(kExitUsage, last_error());
    }
    trace.resize(trace_len);
  } else {
    net = destim_net_train_restarts(sizes.data(), sizes.size(), act, &cfg, data.x.data(),
                                    data.x_dim, data.theta.data(), data.theta_dim, data.rows,
                                    opt.restarts, &summary);
    if (!net) die(kExitTrainingDiverged, "training failed: " + last_error());
  }
  std::unique_ptr<destim_net, decltype(&destim_net_destroy)> guard(net, destim_net_destroy);

  check_input(destim_net_save(net, opt.out.c_str()));
  std::cout << "final_loss = " << format_double(summary.final_loss) << " (epochs "
            << summary.epochs_run << (summary.early_stopped ? ", early stop)" : ")") << '\n';
  std::cout << "model written to " << opt.out << '\n';

  if (!opt.trace_path.empty() && !trace.empty()) {
    std::string text = "# epoch,loss\n";
    for (std::size_t i = 0; i < trace.size(); ++i)
      text += std::to_string(i) + "," + format_double(trace[i]) + "\n";
    write_text_file(opt.trace_path, text);
  }
  if (!opt.eval_path.empty()) {
    PairedData held_out = load_paired(opt.eval_path, data.x_dim, data.theta_dim);
    std::cout << "eval_mse = " << format_double(eval_mse(net, held_out)) << '\n';
  }
}

/* ------------------------------------------------------------------ */
/* bench                                                               */

struct BenchOpts {
  std::string families = "gaussian,laplace,cauchy";
  std::string estimators = "mle,moment,huber,maxcorr";
  std::size_t trials = 10000;
  std::size_t maxcorr_trials = 0;
  std::size_t n = 100;
  std::size_t m = 100;
  std::size_t m1 = 0;  // 0 = m/2
  double theta = 1.0;
  double mu = 1.0;
  double huber_c = 1.0;
  double kernel_h = 1.0;
  std::uint64_t seed = 8421;
  unsigned workers = 0;
  double init_lo = -10.0;
  double init_hi = 10.0;
  std::string out = "report";
};

void run_bench(const BenchOpts& opt) {
  destim_bench_config cfg;
  destim_bench_config_default(&cfg);

  cfg.family_mask = 0;
  for (const std::string& name : split_list(opt.families))
    cfg.family_mask |= 1u << parse_family_or_die(name);
  cfg.estimator_mask = 0;
  for (const std::string& name : split_list(opt.estimators)) {
    if (name == "mle") {
      cfg.estimator_mask |= 1u << DESTIM_EST_MLE;
    } else if (name == "moment") {
      cfg.estimator_mask |= 1u << DESTIM_EST_MOMENT_MATCHING;
    } else if (name == "huber") {
      cfg.estimator_mask |= 1u << DESTIM_EST_HUBER;
    } else if (name == "maxcorr") {
      cfg.estimator_mask |= 1u << DESTIM_EST_MAXCORR;
    } else {
      die(kExitUsage, "unknown estimator '" + name + "' (expected mle|moment|huber|maxcorr)");
    }
  }
  cfg.theta_true = opt.theta;
  cfg.mu_true = opt.mu;
  cfg.n = opt.n;
  cfg.m = opt.m;
  cfg.m1 = opt.m1 != 0 ? opt.m1 : opt.m / 2;
  cfg.m2 = opt.m - cfg.m1;
  cfg.trials = opt.trials;
  cfg.maxcorr_trials = opt.maxcorr_trials;
  cfg.huber_c = opt.huber_c;
  cfg.kernel_h = opt.kernel_h;
  cfg.master_seed = opt.seed;
  cfg.workers = opt.workers;
  cfg.init_lo = opt.init_lo;
  cfg.init_hi = opt.init_hi;

  destim_report* report = nullptr;
  check_input(destim_bench_run(&cfg, &report));
  std::unique_ptr<destim_report, decltype(&destim_report_destroy)> guard(report,
                                                                         destim_report_destroy);

  std::string text = destim_report_text(report);
  std::string json = destim_report_json(report);
  std::cout << text;
  write_text_file(opt.out + ".txt", text);
  write_text_file(opt.out + ".json", json + "\n");
  std::cerr << "bench completed in " << destim_report_total_seconds(report) << " s; wrote "
            << opt.out << ".txt, " << opt.out << ".json\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"destim: data-driven transformation-parameter estimation"};
  app.require_subcommand(1);
  app.set_config("--config", "", "Read options from a TOML config file");

  GenOpts gen;
  CLI::App* gen_cmd = app.add_subcommand("gen-data", "Generate observed/latent dataset files");
  gen_cmd->add_option("--family", gen.family, "Base density: gaussian|laplace|cauchy");
  gen_cmd->add_option("--transform", gen.transform, "Transform: translation|scale|matrix");
  gen_cmd->add_option("--theta", gen.theta, "True parameter vector (comma separated)");
  gen_cmd->add_option("--mu", gen.mu, "Latent location shift");
  gen_cmd->add_option("--dim", gen.dim, "Latent dimension")->check(CLI::PositiveNumber);
  gen_cmd->add_option("--n", gen.n, "Observed sample count")->check(CLI::PositiveNumber);
  gen_cmd->add_option("--m", gen.m, "Latent sample count")->check(CLI::PositiveNumber);
  gen_cmd->add_option("--seed", gen.seed, "Random seed");
  gen_cmd->add_option("--out", gen.out, "Output directory");
  gen_cmd->add_flag("--paired", gen.paired, "Write a single paired (X, theta) training CSV");

  EstimateOpts est;
  CLI::App* est_cmd = app.add_subcommand("estimate", "Estimate theta from dataset files");
  est_cmd->add_option("--method", est.method, "maxcorr|mle|moment|huber|mmse|mmae")->required();
  est_cmd->add_option("--x", est.x_path, "Observed dataset CSV");
  est_cmd->add_option("--z", est.z_path, "Latent dataset CSV");
  est_cmd->add_option("--z1", est.z1_path, "First latent split CSV (maxcorr)");
  est_cmd->add_option("--z2", est.z2_path, "Second latent split CSV (maxcorr)");
  est_cmd->add_option("--prior", est.prior_path, "Prior theta samples CSV (mmse/mmae)");
  est_cmd->add_option("--family", est.family, "Base density family");
  est_cmd->add_option("--mu", est.mu, "Known latent location for the translation likelihood");
  est_cmd->add_option("--transform", est.transform, "Transform for maxcorr");
  est_cmd->add_option("--m1", est.m1, "First split size when splitting --z (default half)");
  est_cmd->add_option("--h", est.kernel_h, "Gaussian kernel bandwidth")->check(CLI::PositiveNumber);
  est_cmd->add_option("--huber-c", est.huber_c, "Huber threshold")->check(CLI::PositiveNumber);
  est_cmd->add_option("--seed", est.seed, "Random seed (splits, optimizer restarts)");
  est_cmd->add_option("--optimizer", est.optimizer, "auto|grid|neldermead|gradient");
  est_cmd->add_option("--restarts", est.restarts, "Optimizer restarts (0 = method default)");
  est_cmd->add_option("--max-iters", est.max_iters, "Optimizer iteration cap (0 = default)");
  est_cmd->add_option("--tol", est.tolerance, "Optimizer tolerance (0 = default)");
  est_cmd->add_option("--init-lo", est.init_lo, "Search box lower bound");
  est_cmd->add_option("--init-hi", est.init_hi, "Search box upper bound");
  est_cmd->add_option("--solver", est.solver, "mmse/mmae solver: closed|gd|sgd");
  est_cmd->add_option("--iter-mu", est.iter_mu, "Step size for gd/sgd solvers");
  est_cmd->add_option("--gd-iters", est.gd_iters, "Max gd iterations");
  est_cmd->add_option("--gd-tol", est.gd_tol, "gd stopping tolerance");
  est_cmd->add_option("--sgd-sweeps", est.sgd_sweeps, "sgd sweeps over the prior samples");
  est_cmd->add_option("--out", est.out, "Write the estimate as JSON to this path");

  TrainOpts train;
  CLI::App* train_cmd = app.add_subcommand("train", "Train the neural estimator on paired data");
  train_cmd->add_option("--data", train.data, "Paired CSV (x columns then theta columns)")
      ->required();
  train_cmd->add_option("--hidden", train.hidden, "Hidden layer sizes, comma separated, or 'none'");
  train_cmd->add_option("--activation", train.activation, "tanh|relu");
  train_cmd->add_option("--cost", train.cost, "mse|mae");
  train_cmd->add_option("--lr", train.learning_rate, "Learning rate")->check(CLI::PositiveNumber);
  train_cmd->add_option("--epochs", train.epochs, "Max epochs");
  train_cmd->add_option("--batch", train.batch, "sgd|full");
  train_cmd->add_flag("--no-shuffle", train.no_shuffle, "Keep dataset order every epoch");
  train_cmd->add_option("--early-stop", train.early_stop, "Relative loss-change stop tolerance");
  train_cmd->add_option("--restarts", train.restarts, "Independent runs, best kept")
      ->check(CLI::PositiveNumber);
  train_cmd->add_option("--seed", train.seed, "Random seed");
  train_cmd->add_option("--x-dim", train.x_dim, "Override x column count");
  train_cmd->add_option("--theta-dim", train.theta_dim, "Override theta column count");
  train_cmd->add_option("--out", train.out, "Model output path");
  train_cmd->add_option("--trace", train.trace_path, "Write the per-epoch loss trace CSV here");
  train_cmd->add_option("--eval", train.eval_path, "Held-out paired CSV; prints its MSE");

  BenchOpts bench;
  CLI::App* bench_cmd =
      app.add_subcommand("bench", "Monte Carlo error-power benchmark (translation problem)");
  bench_cmd->add_option("--families", bench.families, "Comma list of families");
  bench_cmd->add_option("--estimators", bench.estimators, "Comma list of estimators");
  bench_cmd->add_option("--trials", bench.trials, "Trials per cell")->check(CLI::PositiveNumber);
  bench_cmd->add_option("--maxcorr-trials", bench.maxcorr_trials,
                        "Override trials for the maxcorr row (0 = same)");
  bench_cmd->add_option("--n", bench.n, "Observed sample count")->check(CLI::PositiveNumber);
  bench_cmd->add_option("--m", bench.m, "Latent sample count")->check(CLI::PositiveNumber);
  bench_cmd->add_option("--m1", bench.m1, "First latent split size (0 = m/2)");
  bench_cmd->add_option("--theta", bench.theta, "True translation");
  bench_cmd->add_option("--mu", bench.mu, "Latent location");
  bench_cmd->add_option("--huber-c", bench.huber_c, "Huber threshold")
      ->check(CLI::PositiveNumber);
  bench_cmd->add_option("--h", bench.kernel_h, "Kernel bandwidth")->check(CLI::PositiveNumber);
  bench_cmd->add_option("--seed", bench.seed, "Master seed");
  bench_cmd->add_option("--workers", bench.workers, "Worker threads (0 = hardware)");
  bench_cmd->add_option("--init-lo", bench.init_lo, "Maxcorr search box lower bound");
  bench_cmd->add_option("--init-hi", bench.init_hi, "Maxcorr search box upper bound");
  bench_cmd->add_option("--out", bench.out, "Output prefix for .txt/.json reports");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  try {
    if (*gen_cmd) run_gen_data(gen);
    if (*est_cmd) run_estimate(est);
    if (*train_cmd) run_train(train);
    if (*bench_cmd) run_bench(bench);
  } catch (const CliError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return e.exit_code;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  }
  return 0;
}
