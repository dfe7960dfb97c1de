#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <string>

#include "../tools/csv.hpp"

namespace fs = std::filesystem;
using namespace destim_cli;

namespace {

fs::path temp_file(const std::string& name) { return fs::temp_directory_path() / name; }

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path);
  out << text;
}

}  // namespace

TEST_SUITE("csv") {

TEST_CASE("round trip with comments") {
  fs::path path = temp_file("destim_csv_roundtrip.csv");
  double values[6] = {1.5, -2.0, 3.25, 0.1, 1e-17, 12345.678901234567};
  write_csv(path.string(), {"meta one", "x_dim=2 theta_dim=1"}, values, 3, 2);

  Csv csv = read_csv(path.string());
  fs::remove(path);
  CHECK(csv.rows == 3);
  CHECK(csv.cols == 2);
  CHECK(csv.comments.size() == 2);
  for (int i = 0; i < 6; ++i) CHECK(csv.values[i] == values[i]);
  CHECK(comment_size_value(csv.comments, "x_dim") == 2);
  CHECK(comment_size_value(csv.comments, "theta_dim") == 1);
  CHECK(!comment_size_value(csv.comments, "missing").has_value());
}

TEST_CASE("malformed rows report the line number") {
  fs::path path = temp_file("destim_csv_bad.csv");
  write_file(path, "# header\n1.0,2.0\n3.0,oops\n");
  try {
    read_csv(path.string());
    FAIL("expected parse error");
  } catch (const std::runtime_error& e) {
    CHECK(std::string(e.what()).find(":3:") != std::string::npos);
  }
  fs::remove(path);
}

TEST_CASE("ragged rows are rejected") {
  fs::path path = temp_file("destim_csv_ragged.csv");
  write_file(path, "1.0,2.0\n3.0\n");
  CHECK_THROWS(read_csv(path.string()));
  fs::remove(path);
}

TEST_CASE("empty files are rejected") {
  fs::path path = temp_file("destim_csv_empty.csv");
  write_file(path, "# only comments\n");
  CHECK_THROWS(read_csv(path.string()));
  fs::remove(path);
  CHECK_THROWS(read_csv("/nonexistent/destim.csv"));
}

}  // TEST_SUITE
