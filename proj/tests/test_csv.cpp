#include <doctest.h>

#include <cstdio>
#include <fstream>

#include "gazescore/csv.hpp"
#include "gazescore/errors.hpp"
#include "helpers.hpp"

using namespace gazescore;

TEST_CASE("quoted fields round-trip") {
  const std::string path = testutil::temp_dir("csv") + "/q.csv";
  {
    CsvWriter w(path, {"a", "b"});
    w.row({"plain", "with,comma"});
    w.row({"with \"quotes\"", "multi\nline"});
    w.row({"", "x"});
  }
  CsvReader r(path, {"a", "b"});
  REQUIRE(r.next());
  CHECK(r.field("a") == "plain");
  CHECK(r.field("b") == "with,comma");
  REQUIRE(r.next());
  CHECK(r.field("a") == "with \"quotes\"");
  CHECK(r.field("b") == "multi\nline");
  REQUIRE(r.next());
  CHECK(r.field("a") == "");
  CHECK(r.field("b") == "x");
  CHECK_FALSE(r.next());
}

TEST_CASE("missing column and malformed numbers carry file context") {
  const std::string dir = testutil::temp_dir("csv2");
  const std::string path = dir + "/bad.csv";
  {
    std::ofstream out(path);
    out << "a,b\n1,notanumber\n";
  }
  CHECK_THROWS_AS(CsvReader(path, {"a", "missing"}), DataError);
  CsvReader r(path, {"a", "b"});
  REQUIRE(r.next());
  CHECK(r.int_field("a") == 1);
  CHECK_THROWS_WITH_AS(r.double_field("b"),
                       doctest::Contains(":2:"), DataError);
}

TEST_CASE("format_double is shortest round-trip") {
  CHECK(format_double(1.0) == "1");
  CHECK(format_double(0.232) == "0.232");
  CHECK(format_double(-41.46) == "-41.46");
  const double v = 0.1 + 0.2;
  CHECK(std::stod(format_double(v)) == v);
}

TEST_CASE("row width mismatch is rejected") {
  const std::string path = testutil::temp_dir("csv3") + "/w.csv";
  CsvWriter w(path, {"a", "b"});
  CHECK_THROWS_AS(w.row({"only-one"}), DataError);
}
