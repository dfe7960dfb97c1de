#include "core/transforms.hpp"

namespace destim {

std::size_t param_dim(const TransformSpec& spec) {
  if (spec.kind == TransformKind::matrix) return spec.output_dim * spec.input_dim;
  return spec.input_dim;
}

void validate(const TransformSpec& spec) {
  require(spec.input_dim >= 1 && spec.output_dim >= 1, Errc::invalid_argument,
          "transform dimensions must be positive");
  if (spec.kind != TransformKind::matrix) {
    require(spec.input_dim == spec.output_dim, Errc::invalid_argument,
            "translation/scale transforms require input_dim == output_dim");
  }
}

namespace {
void check_args(const TransformSpec& spec, std::span<const double> z,
                std::span<const double> theta, std::size_t out_len) {
  validate(spec);
  require(z.size() == spec.input_dim, Errc::dimension_mismatch, "z length != input_dim");
  require(theta.size() == param_dim(spec), Errc::dimension_mismatch, "theta length != param_dim");
  require(out_len == spec.output_dim, Errc::dimension_mismatch, "output length != output_dim");
}
}  // namespace

void apply(const TransformSpec& spec, std::span<const double> z, std::span<const double> theta,
           std::span<double> out) {
  check_args(spec, z, theta, out.size());
  switch (spec.kind) {
    case TransformKind::translation:
      for (std::size_t i = 0; i < z.size(); ++i) out[i] = z[i] + theta[i];
      return;
    case TransformKind::elementwise_scale:
      for (std::size_t i = 0; i < z.size(); ++i) out[i] = theta[i] * z[i];
      return;
    case TransformKind::matrix:
      for (std::size_t i = 0; i < spec.output_dim; ++i) {
        double acc = 0.0;
        const double* row = theta.data() + i * spec.input_dim;
        for (std::size_t j = 0; j < spec.input_dim; ++j) acc += row[j] * z[j];
        out[i] = acc;
      }
      return;
  }
  fail(Errc::invalid_argument, "unknown transform kind");
}

std::vector<double> apply(const TransformSpec& spec, std::span<const double> z,
                          std::span<const double> theta) {
  std::vector<double> out(spec.output_dim);
  apply(spec, z, theta, out);
  return out;
}

Matrix jacobian_theta(const TransformSpec& spec, std::span<const double> z,
                      std::span<const double> theta) {
  check_args(spec, z, theta, spec.output_dim);
  Matrix jac(spec.output_dim, param_dim(spec));
  switch (spec.kind) {
    case TransformKind::translation:
      for (std::size_t i = 0; i < spec.output_dim; ++i) jac.at(i, i) = 1.0;
      return jac;
    case TransformKind::elementwise_scale:
      for (std::size_t i = 0; i < spec.output_dim; ++i) jac.at(i, i) = z[i];
      return jac;
    case TransformKind::matrix:
      // d(Theta z)_i / dTheta_{ij} = z_j with row-major parameter layout.
      for (std::size_t i = 0; i < spec.output_dim; ++i)
        for (std::size_t j = 0; j < spec.input_dim; ++j) jac.at(i, i * spec.input_dim + j) = z[j];
      return jac;
  }
  fail(Errc::invalid_argument, "unknown transform kind");
}

const char* transform_name(TransformKind kind) {
  switch (kind) {
    case TransformKind::translation:
      return "translation";
    case TransformKind::elementwise_scale:
      return "scale";
    case TransformKind::matrix:
      return "matrix";
  }
  return "?";
}

bool parse_transform(std::string_view name, TransformKind& out) {
  if (name == "translation") {
    out = TransformKind::translation;
  } else if (name == "scale") {
    out = TransformKind::elementwise_scale;
  } else if (name == "matrix") {
    out = TransformKind::matrix;
  } else {
    return false;
  }
  return true;
}

}  // namespace destim
