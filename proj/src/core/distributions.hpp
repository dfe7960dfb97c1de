#pragma once

#include <cstdint>
#include <string_view>
#include <vector>

#include "core/common.hpp"
#include "core/rng.hpp"

namespace destim {

enum class Family { gaussian, laplace, cauchy };

/// Unit-scale base density g0 shifted by `location`: g(w) = g0(w - location).
struct DistributionSpec {
  Family family = Family::gaussian;
  double location = 0.0;
};

/// `count` i.i.d. draws; deterministic given the stream state.
std::vector<double> sample(const DistributionSpec& spec, std::size_t count, Rng& rng);
double sample_one(const DistributionSpec& spec, Rng& rng);

double log_density(const DistributionSpec& spec, double w);

/// d/dw log_density. At the Laplace kink the subgradient midpoint 0 is
/// returned.
double score(const DistributionSpec& spec, double w);

double fisher_information(const DistributionSpec& spec);

/// Variance of the base density; +infinity for Cauchy.
double variance(const DistributionSpec& spec);

/// Two-dataset translation bound (1/fi)(1/n + 1/m).
double crlb(double fisher_info, std::uint64_t n, std::uint64_t m);

const char* family_name(Family family);
bool parse_family(std::string_view name, Family& out);

}  // namespace destim
