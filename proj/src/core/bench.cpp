#include "core/bench.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <limits>
#include <thread>

#include "core/baselines.hpp"
#include "core/maxcorr.hpp"

namespace destim {

const char* estimator_name(EstimatorKind e) {
  switch (e) {
    case EstimatorKind::mle:
      return "mle";
    case EstimatorKind::moment_matching:
      return "moment";
    case EstimatorKind::huber:
      return "huber";
    case EstimatorKind::maxcorr:
      return "maxcorr";
  }
  return "?";
}

const char* estimator_display_name(EstimatorKind e) {
  switch (e) {
    case EstimatorKind::mle:
      return "MLE";
    case EstimatorKind::moment_matching:
      return "Moment Matching";
    case EstimatorKind::huber:
      return "Huber Estimator";
    case EstimatorKind::maxcorr:
      return "Maximal Correlation";
  }
  return "?";
}

bool parse_estimator(std::string_view name, EstimatorKind& out) {
  if (name == "mle") {
    out = EstimatorKind::mle;
  } else if (name == "moment") {
    out = EstimatorKind::moment_matching;
  } else if (name == "huber") {
    out = EstimatorKind::huber;
  } else if (name == "maxcorr") {
    out = EstimatorKind::maxcorr;
  } else {
    return false;
  }
  return true;
}

void ExperimentConfig::validate() const {
  require(!families.empty() && !estimators.empty(), Errc::invalid_argument,
          "benchmark needs at least one family and one estimator");
  require(n >= 1 && m >= 2, Errc::invalid_argument, "dataset sizes must allow a latent split");
  require(m1 >= 1 && m2 >= 1 && m1 + m2 == m, Errc::invalid_argument,
          "latent split sizes must satisfy m1 + m2 = m");
  require(trials >= 1, Errc::invalid_argument, "trials must be >= 1");
  require(huber_c > 0.0 && kernel_h > 0.0, Errc::invalid_argument,
          "huber_c and kernel_h must be positive");
  require(init_lo < init_hi, Errc::invalid_argument, "maxcorr init box is empty");
}

const CellReport* ExperimentReport::find(Family f, EstimatorKind e) const {
  for (const CellReport& c : cells)
    if (c.family == f && c.estimator == e) return &c;
  return nullptr;
}

std::uint64_t trial_seed(std::uint64_t master_seed, Family f, EstimatorKind e, std::size_t index) {
  // Packed key is injective for indices below 2^56.
  std::uint64_t key = (static_cast<std::uint64_t>(f) << 60) |
                      (static_cast<std::uint64_t>(e) << 56) | static_cast<std::uint64_t>(index);
  return derive_seed(master_seed, key);
}

double run_trial(const ExperimentConfig& cfg, Family family, EstimatorKind estimator,
                 std::uint64_t seed) {
  Rng rng(seed);
  DistributionSpec z_spec{family, cfg.mu_true};
  DistributionSpec x_spec{family, cfg.mu_true + cfg.theta_true};
  std::vector<double> z = sample(z_spec, cfg.m, rng);
  std::vector<double> x = sample(x_spec, cfg.n, rng);

  double theta_hat = 0.0;
  switch (estimator) {
    case EstimatorKind::mle:
      theta_hat = mle_translation(x, z, family);
      break;
    case EstimatorKind::moment_matching:
      theta_hat = moment_matching(x, z);
      break;
    case EstimatorKind::huber: {
      HuberConfig hc;
      hc.c = cfg.huber_c;
      theta_hat = huber_translation(x, z, hc);
      break;
    }
    case EstimatorKind::maxcorr: {
      // Fresh latent split every trial.
      auto [z1, z2] = split_latent(Matrix::column(z), cfg.m1, rng.next_u64());
      MaxCorrProblem problem;
      problem.x_data = Matrix::column(x);
      problem.z_split_1 = std::move(z1);
      problem.z_split_2 = std::move(z2);
      problem.transform = {TransformKind::translation, 1, 1};
      problem.kernel.bandwidth = cfg.kernel_h;
      OptimizerConfig opt = OptimizerConfig::defaults(1);
      opt.init_lo = {cfg.init_lo};
      opt.init_hi = {cfg.init_hi};
      opt.seed = rng.next_u64();
      theta_hat = estimate(problem, opt).theta[0];
      break;
    }
  }
  double err = theta_hat - cfg.theta_true;
  return err * err;
}

namespace {

/// Neumaier compensated sum; order-fixed aggregation keeps results identical
/// across worker counts.
class CompensatedSum {
 public:
  void add(double v) {
    double t = sum_ + v;
    if (std::abs(sum_) >= std::abs(v))
      comp_ += (sum_ - t) + v;
    else
      comp_ += (v - t) + sum_;
    sum_ = t;
  }
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

CellReport aggregate_cell(Family family, EstimatorKind estimator, const std::vector<double>& sq,
                          const std::vector<char>& failed) {
  CellReport cell;
  cell.family = family;
  cell.estimator = estimator;
  cell.trials = sq.size();

  CompensatedSum sum;
  std::size_t ok = 0;
  bool divergent = false;
  for (std::size_t i = 0; i < sq.size(); ++i) {
    if (failed[i]) {
      ++cell.failed_trials;
      continue;
    }
    sum.add(sq[i]);
    ++ok;
    if (sum.value() / static_cast<double>(ok) > kDivergenceThreshold) divergent = true;
  }
  double nan = std::numeric_limits<double>::quiet_NaN();
  if (ok == 0) {
    cell.error_power = nan;
    cell.std_error = nan;
    return cell;
  }
  double mean = sum.value() / static_cast<double>(ok);
  cell.error_power = mean;
  cell.divergent = divergent;
  if (ok >= 2) {
    CompensatedSum var;
    for (std::size_t i = 0; i < sq.size(); ++i) {
      if (failed[i]) continue;
      double d = sq[i] - mean;
      var.add(d * d);
    }
    double sample_var = var.value() / static_cast<double>(ok - 1);
    cell.std_error = std::sqrt(sample_var / static_cast<double>(ok));
  } else {
    cell.std_error = nan;
  }
  return cell;
}

}  // namespace

ExperimentReport run_experiment(const ExperimentConfig& cfg) {
  cfg.validate();
  ExperimentReport report;
  report.config = cfg;

  unsigned workers = cfg.workers != 0 ? cfg.workers : std::max(1u, std::thread::hardware_concurrency());
  auto t_start = std::chrono::steady_clock::now();

  for (Family family : cfg.families) {
    for (EstimatorKind estimator : cfg.estimators) {
      std::size_t trials = cfg.trials;
      if (estimator == EstimatorKind::maxcorr && cfg.maxcorr_trials != 0)
        trials = cfg.maxcorr_trials;

      std::vector<double> sq(trials, 0.0);
      std::vector<char> failed(trials, 0);
      auto cell_start = std::chrono::steady_clock::now();

      auto work = [&](std::atomic<std::size_t>& next) {
        for (std::size_t i = next.fetch_add(1); i < trials; i = next.fetch_add(1)) {
          try {
            sq[i] = run_trial(cfg, family, estimator, trial_seed(cfg.master_seed, family,
                                                                 estimator, i));
          } catch (const Error&) {
            failed[i] = 1;
          }
        }
      };

      std::atomic<std::size_t> next{0};
      if (workers <= 1 || trials < 2) {
        work(next);
      } else {
        std::vector<std::thread> pool;
        unsigned count = static_cast<unsigned>(std::min<std::size_t>(workers, trials));
        pool.reserve(count);
        for (unsigned w = 0; w < count; ++w) pool.emplace_back([&] { work(next); });
        for (std::thread& th : pool) th.join();
      }

      CellReport cell = aggregate_cell(family, estimator, sq, failed);
      cell.wall_seconds =
          std::chrono::duration<double>(std::chrono::steady_clock::now() - cell_start).count();
      report.cells.push_back(cell);
    }
  }
  report.total_wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
  return report;
}

std::vector<std::pair<Family, double>> crlb_rows(const ExperimentConfig& cfg) {
  std::vector<std::pair<Family, double>> rows;
  rows.reserve(cfg.families.size());
  for (Family f : cfg.families) {
    DistributionSpec spec{f, 0.0};
    rows.emplace_back(f, crlb(fisher_information(spec), cfg.n, cfg.m));
  }
  return rows;
}

}  // namespace destim
