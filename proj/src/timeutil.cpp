#include "engage/timeutil.hpp"

#include <cctype>
#include <cstdio>

#include "engage/errors.hpp"

namespace engage::timeutil {

std::int64_t days_from_civil(int y, int m, int d) {
  y -= m <= 2;
  const std::int64_t era = (y >= 0 ? y : y - 399) / 400;
  const unsigned yoe = static_cast<unsigned>(y - era * 400);
  const unsigned doy = (153u * static_cast<unsigned>(m + (m > 2 ? -3 : 9)) + 2) / 5 +
                       static_cast<unsigned>(d) - 1;
  const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
  return era * 146097 + static_cast<std::int64_t>(doe) - 719468;
}

void civil_from_days(std::int64_t z, int& year, int& month, int& day) {
  z += 719468;
  const std::int64_t era = (z >= 0 ? z : z - 146096) / 146097;
  const unsigned doe = static_cast<unsigned>(z - era * 146097);
  const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
  const std::int64_t y = static_cast<std::int64_t>(yoe) + era * 400;
  const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
  const unsigned mp = (5 * doy + 2) / 153;
  day = static_cast<int>(doy - (153 * mp + 2) / 5 + 1);
  month = static_cast<int>(mp < 10 ? mp + 3 : mp - 9);
  year = static_cast<int>(y + (month <= 2));
}

namespace {

int days_in_month(int y, int m) {
  static const int kDays[] = {31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
  if (m == 2) {
    const bool leap = (y % 4 == 0 && y % 100 != 0) || y % 400 == 0;
    return leap ? 29 : 28;
  }
  return kDays[m - 1];
}

// Reads 1..max_digits decimal digits; returns false if none present.
bool read_int(const char*& p, int max_digits, int& out) {
  if (!std::isdigit(static_cast<unsigned char>(*p))) return false;
  int v = 0;
  int n = 0;
  while (n < max_digits && std::isdigit(static_cast<unsigned char>(*p))) {
    v = v * 10 + (*p - '0');
    ++p;
    ++n;
  }
  out = v;
  return true;
}

}  // namespace

std::int64_t parse_date(const std::string& text) {
  Minutes t = 0;
  if (!try_parse_timestamp(text, "%Y-%m-%d", t)) {
    throw InputError("bad date \"" + text + "\" (expected YYYY-MM-DD)");
  }
  return t / kMinutesPerDay;
}

std::string format_date(std::int64_t days) {
  int y = 0, m = 0, d = 0;
  civil_from_days(days, y, m, d);
  char buf[16];
  std::snprintf(buf, sizeof(buf), "%04d-%02d-%02d", y, m, d);
  return buf;
}

bool try_parse_timestamp(const std::string& text, const std::string& format,
                         Minutes& out) {
  const char* p = text.c_str();
  int year = 1970, month = 1, day = 1, hour = 0, minute = 0, second = 0;
  for (std::size_t i = 0; i < format.size(); ++i) {
    const char c = format[i];
    if (c == '%') {
      if (i + 1 >= format.size()) return false;
      const char dir = format[++i];
      switch (dir) {
        case 'Y':
          if (!read_int(p, 4, year)) return false;
          break;
        case 'm':
          if (!read_int(p, 2, month)) return false;
          break;
        case 'd':
          if (!read_int(p, 2, day)) return false;
          break;
        case 'H':
          if (!read_int(p, 2, hour)) return false;
          break;
        case 'M':
          if (!read_int(p, 2, minute)) return false;
          break;
        case 'S':
          if (!read_int(p, 2, second)) return false;
          break;
        case '%':
          if (*p != '%') return false;
          ++p;
          break;
        default:
          return false;  // unsupported directive
      }
    } else if (std::isspace(static_cast<unsigned char>(c))) {
      while (std::isspace(static_cast<unsigned char>(*p))) ++p;
    } else {
      if (*p != c) return false;
      ++p;
    }
  }
  while (std::isspace(static_cast<unsigned char>(*p))) ++p;
  if (*p != '\0') return false;

  if (month < 1 || month > 12 || day < 1 || day > days_in_month(year, month) ||
      hour > 23 || minute > 59 || second > 60) {
    return false;
  }
  out = days_from_civil(year, month, day) * kMinutesPerDay + hour * 60 + minute;
  return true;
}

std::string format_timestamp(Minutes t, const std::string& format) {
  int y = 0, m = 0, d = 0;
  std::int64_t days = t / kMinutesPerDay;
  std::int64_t rem = t % kMinutesPerDay;
  if (rem < 0) {
    rem += kMinutesPerDay;
    --days;
  }
  civil_from_days(days, y, m, d);
  const int hour = static_cast<int>(rem / 60);
  const int minute = static_cast<int>(rem % 60);

  std::string result;
  char buf[8];
  for (std::size_t i = 0; i < format.size(); ++i) {
    const char c = format[i];
    if (c != '%') {
      result += c;
      continue;
    }
    if (i + 1 >= format.size()) break;
    switch (format[++i]) {
      case 'Y':
        std::snprintf(buf, sizeof(buf), "%04d", y);
        result += buf;
        break;
      case 'm':
        std::snprintf(buf, sizeof(buf), "%02d", m);
        result += buf;
        break;
      case 'd':
        std::snprintf(buf, sizeof(buf), "%02d", d);
        result += buf;
        break;
      case 'H':
        std::snprintf(buf, sizeof(buf), "%02d", hour);
        result += buf;
        break;
      case 'M':
        std::snprintf(buf, sizeof(buf), "%02d", minute);
        result += buf;
        break;
      case 'S':
        result += "00";
        break;
      case '%':
        result += '%';
        break;
      default:
        break;
    }
  }
  return result;
}

}  // namespace engage::timeutil
