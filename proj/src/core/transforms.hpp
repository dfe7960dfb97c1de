#pragma once

#include <span>
#include <string_view>
#include <vector>

#include "core/common.hpp"

namespace destim {

enum class TransformKind { translation, elementwise_scale, matrix };

/// Parametric map T(z, theta): z + theta, theta (*) z (elementwise), or
/// Theta * z with Theta stored row-major in the parameter vector.
struct TransformSpec {
  TransformKind kind = TransformKind::translation;
  std::size_t input_dim = 1;
  std::size_t output_dim = 1;
};

std::size_t param_dim(const TransformSpec& spec);

/// Throws on inconsistent dims (translation/scale require input == output).
void validate(const TransformSpec& spec);

void apply(const TransformSpec& spec, std::span<const double> z, std::span<const double> theta,
           std::span<double> out);
std::vector<double> apply(const TransformSpec& spec, std::span<const double> z,
                          std::span<const double> theta);

/// dT/dtheta, an output_dim x param_dim matrix.
Matrix jacobian_theta(const TransformSpec& spec, std::span<const double> z,
                      std::span<const double> theta);

const char* transform_name(TransformKind kind);
bool parse_transform(std::string_view name, TransformKind& out);

}  // namespace destim
