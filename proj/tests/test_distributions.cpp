#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "core/distributions.hpp"
#include "support/oracles.hpp"

using namespace destim;

namespace {

double sample_mean(const std::vector<double>& v) {
  double acc = 0.0;
  for (double x : v) acc += x;
  return acc / static_cast<double>(v.size());
}

double sample_variance(const std::vector<double>& v) {
  double m = sample_mean(v);
  double acc = 0.0;
  for (double x : v) acc += (x - m) * (x - m);
  return acc / static_cast<double>(v.size() - 1);
}

double sample_median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  std::size_t n = v.size();
  return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

}  // namespace

TEST_SUITE("distributions") {

TEST_CASE("log_density matches the stated formulas") {
  CHECK(log_density({Family::gaussian, 0.0}, 0.0) ==
        doctest::Approx(-0.5 * std::log(2.0 * std::numbers::pi)).epsilon(1e-12));
  CHECK(log_density({Family::laplace, 0.0}, 0.0) ==
        doctest::Approx(std::log(0.5)).epsilon(1e-12));
  CHECK(log_density({Family::cauchy, 1.0}, 1.0) ==
        doctest::Approx(std::log(1.0 / std::numbers::pi)).epsilon(1e-12));

  // Shift moves the density, not its shape.
  CHECK(log_density({Family::gaussian, 2.5}, 3.5) ==
        doctest::Approx(log_density({Family::gaussian, 0.0}, 1.0)));
}

TEST_CASE("log_density is symmetric about the location") {
  for (Family f : {Family::gaussian, Family::laplace, Family::cauchy}) {
    DistributionSpec spec{f, 0.7};
    for (double w : {0.1, 0.5, 1.3, 4.0, 17.0}) {
      CHECK(log_density(spec, spec.location + w) ==
            doctest::Approx(log_density(spec, spec.location - w)).epsilon(1e-14));
    }
  }
}

TEST_CASE("score trivial values") {
  CHECK(score({Family::gaussian, 0.0}, 2.0) == doctest::Approx(-2.0));
  CHECK(score({Family::laplace, 0.0}, -3.0) == doctest::Approx(1.0));
  CHECK(score({Family::cauchy, 0.0}, 1.0) == doctest::Approx(-1.0));
  CHECK(score({Family::laplace, 0.5}, 0.5) == 0.0);  // kink convention
}

TEST_CASE("score matches finite differences of log_density") {
  Rng rng(20241);
  for (Family f : {Family::gaussian, Family::laplace, Family::cauchy}) {
    DistributionSpec spec{f, 0.25};
    int checked = 0;
    while (checked < 100) {
      double w = spec.location + rng.uniform(-6.0, 6.0);
      if (f == Family::laplace && std::abs(w - spec.location) < 1e-3) continue;
      double fd = oracles::central_diff([&](double t) { return log_density(spec, t); }, w, 1e-5);
      CHECK(oracles::rel_err(score(spec, w), fd, 1e-3) < 1e-4);
      ++checked;
    }
  }
}

TEST_CASE("density integrates to one") {
  for (Family f : {Family::gaussian, Family::laplace}) {
    DistributionSpec spec{f, 0.3};
    double mass = oracles::simpson(
        [&](double w) { return std::exp(log_density(spec, w)); }, spec.location - 50.0,
        spec.location + 50.0, 200000);
    CHECK(mass > 1.0 - 1e-4);
    CHECK(mass < 1.0 + 1e-9);
  }
  DistributionSpec cauchy{Family::cauchy, 0.3};
  double mass = oracles::simpson(
      [&](double w) { return std::exp(log_density(cauchy, w)); }, cauchy.location - 1e4,
      cauchy.location + 1e4, 400000);
  CHECK(mass > 0.999);
  CHECK(mass < 1.0 + 1e-9);
}

TEST_CASE("fisher information values and quadrature cross-check") {
  CHECK(fisher_information({Family::gaussian, 0.0}) == 1.0);
  CHECK(fisher_information({Family::laplace, 0.0}) == 1.0);
  CHECK(fisher_information({Family::cauchy, 0.0}) == 0.5);

  for (Family f : {Family::gaussian, Family::laplace, Family::cauchy}) {
    DistributionSpec spec{f, 0.0};
    // Asymmetric bounds keep the quadrature grid off the Laplace kink, where
    // the score uses its measure-zero subgradient convention.
    double integral = oracles::simpson(
        [&](double w) {
          double s = score(spec, w);
          return s * s * std::exp(log_density(spec, w));
        },
        -999.999, 1000.001, 400000);
    CHECK(std::abs(integral - fisher_information(spec)) < 1e-3);
  }
}

TEST_CASE("variance values") {
  CHECK(variance({Family::gaussian, 0.0}) == 1.0);
  CHECK(variance({Family::laplace, 0.0}) == 2.0);
  CHECK(std::isinf(variance({Family::cauchy, 0.0})));
}

TEST_CASE("crlb formula") {
  CHECK(crlb(1.0, 100, 100) == doctest::Approx(0.020).epsilon(1e-12));
  CHECK(crlb(0.5, 100, 100) == doctest::Approx(0.040).epsilon(1e-12));
  CHECK(crlb(1.0, 100000000, 100) == doctest::Approx(0.010).epsilon(1e-4));
  CHECK_THROWS_AS(crlb(0.0, 10, 10), Error);
}

TEST_CASE("sampling: law of large numbers checks") {
  const std::size_t n = 1000000;
  {
    Rng rng(7);
    auto v = sample({Family::gaussian, 0.0}, n, rng);
    CHECK(std::abs(sample_mean(v)) < 0.005);
    CHECK(std::abs(sample_variance(v) - 1.0) < 0.01);
  }
  {
    Rng rng(8);
    auto v = sample({Family::laplace, 1.0}, n, rng);
    CHECK(std::abs(sample_median(v) - 1.0) < 0.005);
    CHECK(std::abs(sample_variance(v) - 2.0) < 0.05);
  }
  {
    Rng rng(9);
    auto v = sample({Family::cauchy, 0.0}, n, rng);
    CHECK(std::abs(sample_median(v)) < 0.01);
    CHECK(sample_variance(v) > 100.0);  // no finite variance to settle on
  }
}

TEST_CASE("sampling determinism") {
  for (Family f : {Family::gaussian, Family::laplace, Family::cauchy}) {
    Rng a(1234), b(1234);
    auto va = sample({f, 0.5}, 1000, a);
    auto vb = sample({f, 0.5}, 1000, b);
    CHECK(va == vb);
  }
  CHECK_THROWS_AS([] {
    Rng rng(1);
    sample({Family::gaussian, 0.0}, 0, rng);
  }(), Error);
}

}  // TEST_SUITE
