#include "csv.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace destim_cli {

namespace {

std::string trim(const std::string& s) {
  std::size_t a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  std::size_t b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

[[noreturn]] void parse_fail(const std::string& path, std::size_t line, const std::string& msg) {
  throw std::runtime_error(path + ":" + std::to_string(line) + ": " + msg);
}

}  // namespace

Csv read_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in.good()) throw std::runtime_error("cannot open file: " + path);

  Csv csv;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string t = trim(line);
    if (t.empty()) continue;
    if (t[0] == '#') {
      csv.comments.push_back(trim(t.substr(1)));
      continue;
    }
    std::vector<double> row;
    std::stringstream ss(t);
    std::string field;
    while (std::getline(ss, field, ',')) {
      field = trim(field);
      if (field.empty()) parse_fail(path, line_no, "empty field");
      try {
        std::size_t used = 0;
        double v = std::stod(field, &used);
        if (used != field.size()) parse_fail(path, line_no, "malformed number '" + field + "'");
        row.push_back(v);
      } catch (const std::invalid_argument&) {
        parse_fail(path, line_no, "malformed number '" + field + "'");
      } catch (const std::out_of_range&) {
        parse_fail(path, line_no, "number out of range '" + field + "'");
      }
    }
    if (row.empty()) parse_fail(path, line_no, "empty row");
    if (csv.rows == 0) {
      csv.cols = row.size();
    } else if (row.size() != csv.cols) {
      parse_fail(path, line_no,
                 "expected " + std::to_string(csv.cols) + " columns, found " +
                     std::to_string(row.size()));
    }
    csv.values.insert(csv.values.end(), row.begin(), row.end());
    ++csv.rows;
  }
  if (csv.rows == 0) throw std::runtime_error(path + ": no data rows");
  return csv;
}

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void write_csv(const std::string& path, const std::vector<std::string>& comments,
               const double* values, std::size_t rows, std::size_t cols) {
  std::ofstream out(path);
  if (!out.good()) throw std::runtime_error("cannot open file for writing: " + path);
  for (const std::string& c : comments) out << "# " << c << '\n';
  for (std::size_t i = 0; i < rows; ++i) {
    for (std::size_t j = 0; j < cols; ++j) {
      if (j) out << ',';
      out << format_double(values[i * cols + j]);
    }
    out << '\n';
  }
  if (!out.good()) throw std::runtime_error("failed writing file: " + path);
}

std::optional<std::size_t> comment_size_value(const std::vector<std::string>& comments,
                                              const std::string& key) {
  std::string needle = key + "=";
  for (const std::string& c : comments) {
    std::stringstream ss(c);
    std::string token;
    while (ss >> token) {
      if (token.rfind(needle, 0) == 0) {
        try {
          return static_cast<std::size_t>(std::stoull(token.substr(needle.size())));
        } catch (...) {
          return std::nullopt;
        }
      }
    }
  }
  return std::nullopt;
}

}  // namespace destim_cli
