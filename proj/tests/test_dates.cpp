#include <doctest.h>

#include "core/dates.hpp"
#include "test_util.hpp"

using namespace evk;

TEST_CASE("epoch anchor and round trips") {
  CHECK(days_from_civil(1970, 1, 1) == 0);
  CHECK(days_from_civil(1970, 1, 2) == 1);
  CHECK(days_from_civil(1969, 12, 31) == -1);

  for (const char* s : {"1970-01-01", "1999-12-31", "2000-02-29", "2020-02-29",
                        "2022-11-11", "2024-04-20", "2100-12-31"}) {
    CHECK(format_date(parse_date(s)) == s);
  }

  // Consecutive calendar days differ by exactly one.
  CHECK(parse_date("2021-03-01") - parse_date("2021-02-28") == 1);
  CHECK(parse_date("2020-03-01") - parse_date("2020-02-29") == 1);
  CHECK(parse_date("2023-01-01") - parse_date("2022-12-31") == 1);
}

TEST_CASE("civil_from_days inverts days_from_civil across years") {
  for (Date d = days_from_civil(1995, 1, 1); d <= days_from_civil(2030, 1, 1);
       d += 97) {
    int y;
    unsigned m, dd;
    civil_from_days(d, y, m, dd);
    CHECK(days_from_civil(y, m, dd) == d);
  }
}

TEST_CASE("weekday is anchored to known calendar facts") {
  CHECK(weekday(parse_date("1970-01-01")) == 3);  // Thursday
  CHECK(weekday(parse_date("2020-03-12")) == 3);  // Thursday
  CHECK(weekday(parse_date("2022-11-11")) == 4);  // Friday
  CHECK(weekday(parse_date("2024-03-13")) == 2);  // Wednesday
  CHECK(weekday(parse_date("2023-06-05")) == 0);  // Monday
  CHECK(weekday(parse_date("2021-06-06")) == 6);  // Sunday
  CHECK(weekday(parse_date("1969-12-28")) == 6);  // Sunday, negative day count
}

TEST_CASE("malformed dates are parse errors") {
  for (const char* s :
       {"2021-02-29", "2021-13-01", "2021-00-10", "2021-04-31", "21-01-01",
        "2021/01/01", "2021-1-01", "2021-01-1", "", "not-a-date"}) {
    CHECK_FAILS_WITH(parse_date(s), ErrorCode::Parse);
  }
}
