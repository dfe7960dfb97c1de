#pragma once

#include <cstdint>
#include <string_view>
#include <vector>

#include "core/distributions.hpp"

namespace destim {

enum class EstimatorKind { mle, moment_matching, huber, maxcorr };

const char* estimator_name(EstimatorKind e);
const char* estimator_display_name(EstimatorKind e);
bool parse_estimator(std::string_view name, EstimatorKind& out);

/// Translation benchmark: X ~ g0(. - mu - theta), Z ~ g0(. - mu), error power
/// of each estimator over independent trials.
struct ExperimentConfig {
  std::vector<Family> families{Family::gaussian, Family::laplace, Family::cauchy};
  std::vector<EstimatorKind> estimators{EstimatorKind::mle, EstimatorKind::moment_matching,
                                        EstimatorKind::huber, EstimatorKind::maxcorr};
  double theta_true = 1.0;
  double mu_true = 1.0;
  std::size_t n = 100;
  std::size_t m = 100;
  std::size_t m1 = 50;
  std::size_t m2 = 50;
  std::size_t trials = 10000;
  std::size_t maxcorr_trials = 0;  // 0 = same as trials
  double huber_c = 1.0;
  double kernel_h = 1.0;
  std::uint64_t master_seed = 8421;
  unsigned workers = 0;  // 0 = hardware concurrency
  double init_lo = -10.0;  // maxcorr search box
  double init_hi = 10.0;

  void validate() const;
};

struct CellReport {
  Family family = Family::gaussian;
  EstimatorKind estimator = EstimatorKind::mle;
  double error_power = 0.0;  // mean squared error over successful trials
  bool divergent = false;    // running mean exceeded the divergence threshold
  double std_error = 0.0;    // NaN when fewer than 2 successful trials
  std::size_t trials = 0;
  std::size_t failed_trials = 0;
  double wall_seconds = 0.0;  // not serialized: reports must be reproducible
};

struct ExperimentReport {
  ExperimentConfig config;
  std::vector<CellReport> cells;
  double total_wall_seconds = 0.0;

  const CellReport* find(Family f, EstimatorKind e) const;
};

/// Mean squared error above which a cell is reported as divergent (Table-1
/// style infinity): any finite sample mean is meaningless once the running
/// mean wanders that far.
inline constexpr double kDivergenceThreshold = 1e3;

/// Stream seed for one trial; injective in (family, estimator, index) for a
/// fixed master seed.
std::uint64_t trial_seed(std::uint64_t master_seed, Family f, EstimatorKind e, std::size_t index);

/// One fresh-draw trial; returns the squared error. Estimator failures
/// propagate as exceptions and are recorded by run_experiment.
double run_trial(const ExperimentConfig& cfg, Family family, EstimatorKind estimator,
                 std::uint64_t seed);

ExperimentReport run_experiment(const ExperimentConfig& cfg);

std::vector<std::pair<Family, double>> crlb_rows(const ExperimentConfig& cfg);

}  // namespace destim
