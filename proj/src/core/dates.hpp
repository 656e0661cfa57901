#pragma once

#include <string>
#include <string_view>

namespace evk {

// Dates are plain integers: days since 1970-01-01 (UTC calendar days).
using Date = int;

// Howard Hinnant's civil-date algorithms; valid across the full int range
// used here (proleptic Gregorian calendar).
Date days_from_civil(int y, unsigned m, unsigned d);
void civil_from_days(Date z, int& y, unsigned& m, unsigned& d);

// Strict ISO-8601 calendar date, "YYYY-MM-DD".  Throws Parse on anything else.
Date parse_date(std::string_view s);
std::string format_date(Date d);

// 0 = Monday ... 6 = Sunday.
int weekday(Date d);
extern const char* const kWeekdayNames[7];

}  // namespace evk
