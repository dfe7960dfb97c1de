#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

namespace destim_cli {

/// Numeric CSV with '#'-prefixed header comments. One sample per row,
/// columns are vector components.
struct Csv {
  std::vector<std::string> comments;  // without the leading '#'
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> values;  // row-major
};

/// Throws std::runtime_error with "path:line:" prefixed messages on
/// malformed rows.
Csv read_csv(const std::string& path);

void write_csv(const std::string& path, const std::vector<std::string>& comments,
               const double* values, std::size_t rows, std::size_t cols);

/// Looks for "key=value" tokens in the comment lines (e.g. "x_dim=2").
std::optional<std::size_t> comment_size_value(const std::vector<std::string>& comments,
                                              const std::string& key);

std::string format_double(double v);

}  // namespace destim_cli
