#pragma once

#include <compare>
#include <cstdint>
#include <string>
#include <string_view>

namespace polrhet {

// Calendar date in the proleptic Gregorian calendar, UTC.
struct Date {
  int year = 1970;
  int month = 1;  // 1..12
  int day = 1;    // 1..31

  auto operator<=>(const Date&) const = default;
};

bool valid_date(const Date& d);

// Days since 1970-01-01 (negative before the epoch).
int64_t days_from_civil(const Date& d);
Date civil_from_days(int64_t days);

// Parses "YYYY-MM-DD".  Throws SchemaError on malformed or invalid input.
Date parse_date(std::string_view s);
std::string format_date(const Date& d);

// UTC instant as seconds since 1970-01-01T00:00:00Z.
// Accepts "YYYY-MM-DD HH:MM:SS", "YYYY-MM-DDTHH:MM:SS", an optional trailing
// 'Z', and a bare "YYYY-MM-DD" (midnight).  Throws SchemaError otherwise.
int64_t parse_timestamp(std::string_view s);
std::string format_timestamp(int64_t seconds);
Date date_of_timestamp(int64_t seconds);

struct YearMonth {
  int year = 1970;
  int month = 1;
  auto operator<=>(const YearMonth&) const = default;
};

YearMonth year_month(const Date& d);
std::string format_year_month(const YearMonth& ym);
YearMonth parse_year_month(std::string_view s);  // "YYYY-MM"

// Adds n months (n may be negative), staying on the first of the month.
YearMonth add_months(const YearMonth& ym, int n);
// Number of month steps from a to b (b - a in months).
int months_between(const YearMonth& a, const YearMonth& b);

// ISO-8601 week date.  `year` is the ISO week-based year, which can differ
// from the calendar year in the first and last days of the year.
struct IsoWeek {
  int year = 1970;
  int week = 1;  // 1..53
  auto operator<=>(const IsoWeek&) const = default;
};

IsoWeek iso_week(const Date& d);
std::string format_iso_week(const IsoWeek& w);  // "YYYY-Www"

}  // namespace polrhet
