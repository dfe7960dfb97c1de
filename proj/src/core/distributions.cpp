#include "core/distributions.hpp"

#include <cmath>
#include <limits>
#include <numbers>

namespace destim {

namespace {
constexpr double kLogSqrt2Pi = 0.9189385332046727417803297364056;  // ln sqrt(2*pi)
const double kLogPi = std::log(std::numbers::pi);
}  // namespace

double sample_one(const DistributionSpec& spec, Rng& rng) {
  switch (spec.family) {
    case Family::gaussian:
      return spec.location + rng.normal();
    case Family::laplace: {
      // Inverse CDF; u is strictly inside (0,1).
      double u = rng.uniform();
      return u < 0.5 ? spec.location + std::log(2.0 * u) : spec.location - std::log(2.0 * (1.0 - u));
    }
    case Family::cauchy: {
      double u = rng.uniform();
      return spec.location + std::tan(std::numbers::pi * (u - 0.5));
    }
  }
  fail(Errc::invalid_argument, "unknown distribution family");
}

std::vector<double> sample(const DistributionSpec& spec, std::size_t count, Rng& rng) {
  require(count >= 1, Errc::invalid_argument, "sample count must be positive");
  std::vector<double> out(count);
  for (double& v : out) v = sample_one(spec, rng);
  return out;
}

double log_density(const DistributionSpec& spec, double w) {
  double t = w - spec.location;
  switch (spec.family) {
    case Family::gaussian:
      return -kLogSqrt2Pi - 0.5 * t * t;
    case Family::laplace:
      return -std::numbers::ln2 - std::abs(t);
    case Family::cauchy:
      return -kLogPi - std::log1p(t * t);
  }
  fail(Errc::invalid_argument, "unknown distribution family");
}

double score(const DistributionSpec& spec, double w) {
  double t = w - spec.location;
  switch (spec.family) {
    case Family::gaussian:
      return -t;
    case Family::laplace:
      // Subgradient midpoint at the kink.
      return t > 0.0 ? -1.0 : (t < 0.0 ? 1.0 : 0.0);
    case Family::cauchy:
      return -2.0 * t / (1.0 + t * t);
  }
  fail(Errc::invalid_argument, "unknown distribution family");
}

double fisher_information(const DistributionSpec& spec) {
  switch (spec.family) {
    case Family::gaussian:
      return 1.0;
    case Family::laplace:
      return 1.0;
    case Family::cauchy:
      return 0.5;
  }
  fail(Errc::invalid_argument, "unknown distribution family");
}

double variance(const DistributionSpec& spec) {
  switch (spec.family) {
    case Family::gaussian:
      return 1.0;
    case Family::laplace:
      return 2.0;
    case Family::cauchy:
      return std::numeric_limits<double>::infinity();
  }
  fail(Errc::invalid_argument, "unknown distribution family");
}

double crlb(double fisher_info, std::uint64_t n, std::uint64_t m) {
  require(fisher_info > 0.0, Errc::invalid_argument, "Fisher information must be positive");
  require(n >= 1 && m >= 1, Errc::invalid_argument, "dataset sizes must be positive");
  return (1.0 / fisher_info) * (1.0 / static_cast<double>(n) + 1.0 / static_cast<double>(m));
}

const char* family_name(Family family) {
  switch (family) {
    case Family::gaussian:
      return "gaussian";
    case Family::laplace:
      return "laplace";
    case Family::cauchy:
      return "cauchy";
  }
  return "?";
}

bool parse_family(std::string_view name, Family& out) {
  if (name == "gaussian") {
    out = Family::gaussian;
  } else if (name == "laplace") {
    out = Family::laplace;
  } else if (name == "cauchy") {
    out = Family::cauchy;
  } else {
    return false;
  }
  return true;
}

}  // namespace destim
