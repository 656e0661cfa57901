#include "core/dates.hpp"

#include <charconv>
#include <cstdio>

#include "core/errors.hpp"

namespace evk {

const char* const kWeekdayNames[7] = {"Monday", "Tuesday",  "Wednesday",
                                      "Thursday", "Friday", "Saturday",
                                      "Sunday"};

Date days_from_civil(int y, unsigned m, unsigned d) {
  y -= m <= 2;
  const int era = (y >= 0 ? y : y - 399) / 400;
  const unsigned yoe = static_cast<unsigned>(y - era * 400);             // [0, 399]
  const unsigned doy = (153 * (m + (m > 2 ? -3 : 9)) + 2) / 5 + d - 1;   // [0, 365]
  const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;            // [0, 146096]
  return era * 146097 + static_cast<int>(doe) - 719468;
}

void civil_from_days(Date z, int& y, unsigned& m, unsigned& d) {
  z += 719468;
  const int era = (z >= 0 ? z : z - 146096) / 146097;
  const unsigned doe = static_cast<unsigned>(z - era * 146097);          // [0, 146096]
  const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
  y = static_cast<int>(yoe) + era * 400;
  const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);          // [0, 365]
  const unsigned mp = (5 * doy + 2) / 153;                               // [0, 11]
  d = doy - (153 * mp + 2) / 5 + 1;                                      // [1, 31]
  m = mp + (mp < 10 ? 3 : -9);                                           // [1, 12]
  y += m <= 2;
}

namespace {

bool parse_uint_exact(std::string_view s, unsigned& out) {
  unsigned v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size()) return false;
  out = v;
  return true;
}

constexpr unsigned kDaysInMonth[12] = {31, 28, 31, 30, 31, 30,
                                       31, 31, 30, 31, 30, 31};

bool is_leap(int y) { return (y % 4 == 0 && y % 100 != 0) || y % 400 == 0; }

}  // namespace

Date parse_date(std::string_view s) {
  unsigned y = 0, m = 0, d = 0;
  bool shape_ok = s.size() == 10 && s[4] == '-' && s[7] == '-' &&
                  parse_uint_exact(s.substr(0, 4), y) &&
                  parse_uint_exact(s.substr(5, 2), m) &&
                  parse_uint_exact(s.substr(8, 2), d);
  if (!shape_ok)
    fail(ErrorCode::Parse, "bad date '" + std::string(s) + "' (want YYYY-MM-DD)");
  unsigned dmax = 0;
  if (m >= 1 && m <= 12) {
    dmax = kDaysInMonth[m - 1];
    if (m == 2 && is_leap(static_cast<int>(y))) dmax = 29;
  }
  if (m < 1 || m > 12 || d < 1 || d > dmax)
    fail(ErrorCode::Parse, "bad date '" + std::string(s) + "' (no such calendar day)");
  return days_from_civil(static_cast<int>(y), m, d);
}

std::string format_date(Date z) {
  int y;
  unsigned m, d;
  civil_from_days(z, y, m, d);
  char buf[16];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", y, m, d);
  return buf;
}

int weekday(Date d) {
  // 1970-01-01 was a Thursday (index 3 when Monday = 0).
  return static_cast<int>(((d % 7) + 7 + 3) % 7);
}

}  // namespace evk
