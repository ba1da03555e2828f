#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <filesystem>
#include <random>

#include "skna/digest.hpp"
#include "skna/io_util.hpp"
#include "test_helpers.hpp"

using namespace skna;

TEST_CASE("format_double round-trips exactly", "[io]") {
  std::mt19937_64 eng(7);
  std::uniform_real_distribution<double> uni(-1e6, 1e6);
  for (int i = 0; i < 2000; ++i) {
    const double v = uni(eng);
    const std::string s = format_double(v);
    CHECK(parse_double_strict(s, "round-trip") == v);
  }
  CHECK(format_double(0.0) == "0");
  CHECK(format_double(1.0) == "1");
  CHECK(format_double(-2.5) == "-2.5");
  CHECK(parse_double_strict(format_double(0.1), "t") == 0.1);
  CHECK(parse_double_strict(format_double(1e-17), "t") == 1e-17);
}

TEST_CASE("strict parsing rejects partial and empty tokens", "[io]") {
  CHECK(parse_double_strict(" 2.5 ", "t") == 2.5);
  CHECK_THROWS_AS(parse_double_strict("2.5x", "t"), FormatError);
  CHECK_THROWS_AS(parse_double_strict("", "t"), FormatError);
  CHECK_THROWS_AS(parse_double_strict("--3", "t"), FormatError);
  CHECK(parse_int_strict("42", "t") == 42);
  CHECK_THROWS_AS(parse_int_strict("4.2", "t"), FormatError);
  CHECK_THROWS_AS(parse_int_strict("", "t"), FormatError);
}

TEST_CASE("split and trim", "[io]") {
  auto parts = split_view("a, b ,,c", ',');
  REQUIRE(parts.size() == 4);
  CHECK(parts[0] == "a");
  CHECK(trim_view(parts[1]) == "b");
  CHECK(parts[2].empty());
  CHECK(parts[3] == "c");
  CHECK(trim_view("  \t x \r\n") == "x");
  CHECK(trim_view("") == "");
  CHECK(split_view("", ',').size() == 1);
}

TEST_CASE("atomic writes leave no temp file behind", "[io]") {
  testutil::TempDir dir("iowrite");
  const auto path = dir / "out.txt";
  write_file_atomic(path, "hello\n");
  CHECK(testutil::slurp(path) == "hello\n");
  write_file_atomic(path, "replaced\n");
  CHECK(testutil::slurp(path) == "replaced\n");
  int files = 0;
  for ([[maybe_unused]] const auto& e : std::filesystem::directory_iterator(dir.path())) ++files;
  CHECK(files == 1);
}

TEST_CASE("read_text_file on a missing path fails loudly", "[io]") {
  CHECK_THROWS_AS(read_text_file("/nonexistent/skna/file.txt"), FormatError);
}

TEST_CASE("sha256 matches the reference vectors", "[io]") {
  CHECK(sha256_hex("") ==
        "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
  CHECK(sha256_hex("abc") ==
        "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
  CHECK(sha256_hex("abc") == sha256_hex("abc"));
  CHECK(sha256_hex("abd") != sha256_hex("abc"));
}
