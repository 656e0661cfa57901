#include <doctest.h>

#include <filesystem>

#include "core/csv.hpp"
#include "test_util.hpp"

using namespace evk;

TEST_CASE("split_fields keeps empty fields") {
  CHECK(split_fields("a,b,c") == std::vector<std::string>{"a", "b", "c"});
  CHECK(split_fields("a,,c") == std::vector<std::string>{"a", "", "c"});
  CHECK(split_fields(",") == std::vector<std::string>{"", ""});
  CHECK(split_fields("solo") == std::vector<std::string>{"solo"});
}

TEST_CASE("format_double round-trips exactly") {
  for (double v : {0.1, -0.068412, 1.0 / 3.0, 1e-17, -2.5e300, 0.0, 42.0}) {
    const std::string s = format_double(v);
    CHECK(parse_double_field(s, "test") == v);
  }
}

TEST_CASE("strict numeric parsing rejects trailing junk") {
  CHECK(parse_double_field("1.5", "t") == 1.5);
  CHECK(parse_int_field("-7", "t") == -7);
  CHECK_FAILS_WITH(parse_double_field("1.5x", "t"), ErrorCode::Parse);
  CHECK_FAILS_WITH(parse_double_field("", "t"), ErrorCode::Parse);
  CHECK_FAILS_WITH(parse_int_field("1.5", "t"), ErrorCode::Parse);
  CHECK_FAILS_WITH(parse_int_field(" 2", "t"), ErrorCode::Parse);
}

TEST_CASE("reader enforces header and field counts with line numbers") {
  testutil::TempDir tmp("csv");
  const std::string path = testutil::write_file(
      tmp, "t.csv", "a,b\n1,2\n\n3,4\n5,6,7\n");
  CsvReader r(path);
  r.expect_header({"a", "b"});
  std::vector<std::string> row;
  CHECK(r.next_row(row));
  CHECK(row == std::vector<std::string>{"1", "2"});
  CHECK(r.next_row(row));  // blank line skipped
  CHECK(row == std::vector<std::string>{"3", "4"});
  try {
    r.next_row(row);
    FAIL("expected field-count error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::Parse);
    CHECK(std::string(e.what()).find(":5") != std::string::npos);
  }
}

TEST_CASE("reader rejects a wrong header") {
  testutil::TempDir tmp("csv_hdr");
  const std::string path = testutil::write_file(tmp, "t.csv", "x,y\n1,2\n");
  CsvReader r(path);
  CHECK_FAILS_WITH(r.expect_header({"a", "b"}), ErrorCode::Parse);
}

TEST_CASE("missing file is an io error") {
  CHECK_FAILS_WITH(CsvReader("/no/such/file.csv"), ErrorCode::Io);
  CHECK_FAILS_WITH(read_file("/no/such/file.csv"), ErrorCode::Io);
}

TEST_CASE("writer refuses fields containing the delimiter") {
  CsvWriter w;
  CHECK_FAILS_WITH(w.row({"a,b"}), ErrorCode::InvalidArgument);
}

TEST_CASE("atomic write leaves no temp file behind") {
  testutil::TempDir tmp("atomic");
  const std::string path = tmp.path("sub/out.txt");
  write_file_atomic(path, "payload");
  CHECK(testutil::slurp(path) == "payload");
  CHECK(!std::filesystem::exists(path + ".tmp"));
}
