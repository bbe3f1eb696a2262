#include "polrhet/dates.hpp"

#include <charconv>
#include <chrono>

#include "polrhet/errors.hpp"

namespace polrhet {

namespace {

namespace chr = std::chrono;

chr::year_month_day to_ymd(const Date& d) {
  return chr::year_month_day{chr::year{d.year}, chr::month{unsigned(d.month)},
                             chr::day{unsigned(d.day)}};
}

int parse_int_field(std::string_view s, size_t pos, size_t len, std::string_view what) {
  if (pos + len > s.size()) throw SchemaError("truncated " + std::string(what) + ": '" + std::string(s) + "'");
  int value = 0;
  auto [ptr, ec] = std::from_chars(s.data() + pos, s.data() + pos + len, value);
  if (ec != std::errc{} || ptr != s.data() + pos + len)
    throw SchemaError("bad " + std::string(what) + " in '" + std::string(s) + "'");
  return value;
}

void expect_char(std::string_view s, size_t pos, char c) {
  if (pos >= s.size() || s[pos] != c)
    throw SchemaError("expected '" + std::string(1, c) + "' at position " +
                      std::to_string(pos) + " in '" + std::string(s) + "'");
}

}  // namespace

bool valid_date(const Date& d) { return to_ymd(d).ok(); }

int64_t days_from_civil(const Date& d) {
  return chr::sys_days{to_ymd(d)}.time_since_epoch().count();
}

Date civil_from_days(int64_t days) {
  chr::year_month_day ymd{chr::sys_days{chr::days{days}}};
  return Date{int(ymd.year()), int(unsigned(ymd.month())), int(unsigned(ymd.day()))};
}

Date parse_date(std::string_view s) {
  if (s.size() != 10) throw SchemaError("bad date '" + std::string(s) + "' (want YYYY-MM-DD)");
  Date d;
  d.year = parse_int_field(s, 0, 4, "year");
  expect_char(s, 4, '-');
  d.month = parse_int_field(s, 5, 2, "month");
  expect_char(s, 7, '-');
  d.day = parse_int_field(s, 8, 2, "day");
  if (!valid_date(d)) throw SchemaError("invalid calendar date '" + std::string(s) + "'");
  return d;
}

std::string format_date(const Date& d) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%04d-%02d-%02d", d.year, d.month, d.day);
  return buf;
}

int64_t parse_timestamp(std::string_view s) {
  if (!s.empty() && s.back() == 'Z') s.remove_suffix(1);
  if (s.size() == 10) return days_from_civil(parse_date(s)) * 86400;
  if (s.size() != 19) throw SchemaError("bad timestamp '" + std::string(s) + "'");
  if (s[10] != ' ' && s[10] != 'T')
    throw SchemaError("bad timestamp separator in '" + std::string(s) + "'");
  Date d = parse_date(s.substr(0, 10));
  int hh = parse_int_field(s, 11, 2, "hour");
  expect_char(s, 13, ':');
  int mm = parse_int_field(s, 14, 2, "minute");
  expect_char(s, 16, ':');
  int ss = parse_int_field(s, 17, 2, "second");
  if (hh < 0 || hh > 23 || mm < 0 || mm > 59 || ss < 0 || ss > 60)
    throw SchemaError("time of day out of range in '" + std::string(s) + "'");
  return days_from_civil(d) * 86400 + hh * 3600 + mm * 60 + ss;
}

std::string format_timestamp(int64_t seconds) {
  int64_t days = seconds / 86400;
  int64_t rem = seconds % 86400;
  if (rem < 0) {
    rem += 86400;
    days -= 1;
  }
  Date d = civil_from_days(days);
  char buf[32];
  std::snprintf(buf, sizeof buf, "%04d-%02d-%02d %02d:%02d:%02d", d.year, d.month, d.day,
                int(rem / 3600), int(rem / 60 % 60), int(rem % 60));
  return buf;
}

Date date_of_timestamp(int64_t seconds) {
  int64_t days = seconds / 86400;
  if (seconds % 86400 < 0) days -= 1;
  return civil_from_days(days);
}

YearMonth year_month(const Date& d) { return YearMonth{d.year, d.month}; }

std::string format_year_month(const YearMonth& ym) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%04d-%02d", ym.year, ym.month);
  return buf;
}

YearMonth parse_year_month(std::string_view s) {
  if (s.size() != 7) throw SchemaError("bad month '" + std::string(s) + "' (want YYYY-MM)");
  YearMonth ym;
  ym.year = parse_int_field(s, 0, 4, "year");
  expect_char(s, 4, '-');
  ym.month = parse_int_field(s, 5, 2, "month");
  if (ym.month < 1 || ym.month > 12) throw SchemaError("month out of range in '" + std::string(s) + "'");
  return ym;
}

YearMonth add_months(const YearMonth& ym, int n) {
  int linear = ym.year * 12 + (ym.month - 1) + n;
  int year = linear / 12;
  int month = linear % 12;
  if (month < 0) {
    month += 12;
    year -= 1;
  }
  return YearMonth{year, month + 1};
}

int months_between(const YearMonth& a, const YearMonth& b) {
  return (b.year * 12 + b.month) - (a.year * 12 + a.month);
}

IsoWeek iso_week(const Date& d) {
  // ISO week = week (Mon..Sun) of the Thursday falling in that week.
  int64_t days = days_from_civil(d);
  int64_t dow = (days % 7 + 7 + 3) % 7;  // 0 = Monday (1970-01-01 was a Thursday)
  int64_t thursday = days - dow + 3;
  int iso_year = civil_from_days(thursday).year;
  int64_t jan1 = days_from_civil(Date{iso_year, 1, 1});
  int week = int((thursday - jan1) / 7) + 1;
  return IsoWeek{iso_year, week};
}

std::string format_iso_week(const IsoWeek& w) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%04d-W%02d", w.year, w.week);
  return buf;
}

}  // namespace polrhet
