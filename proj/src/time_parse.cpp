#include "rubric_reward/time_parse.hpp"

#include <array>
#include <cctype>
#include <string>

#include "rubric_reward/error.hpp"
#include "rubric_reward/text.hpp"

namespace rubric_reward {

namespace {

constexpr std::array<std::string_view, 12> kMonths = {
    "january", "february", "march",     "april",   "may",      "june",
    "july",    "august",   "september", "october", "november", "december"};

bool is_ws(char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r'; }

char lower(char c) { return static_cast<char>(std::tolower(static_cast<unsigned char>(c))); }

bool match_ci(std::string_view s, std::size_t pos, std::string_view word) {
  if (pos + word.size() > s.size()) return false;
  for (std::size_t i = 0; i < word.size(); ++i) {
    if (lower(s[pos + i]) != lower(word[i])) return false;
  }
  return true;
}

std::optional<int> read_int(std::string_view s, std::size_t& pos, std::size_t min_digits,
                            std::size_t max_digits) {
  std::size_t start = pos;
  int value = 0;
  while (pos < s.size() && pos - start < max_digits &&
         std::isdigit(static_cast<unsigned char>(s[pos]))) {
    value = value * 10 + (s[pos] - '0');
    ++pos;
  }
  if (pos - start < min_digits) return std::nullopt;
  return value;
}

bool leap(int y) { return (y % 4 == 0 && y % 100 != 0) || y % 400 == 0; }

int days_in_month(int month, std::optional<int> year) {
  static constexpr std::array<int, 12> kDays = {31, 29, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
  if (month == 2 && year) return leap(*year) ? 29 : 28;
  return kDays[month - 1];
}

}  // namespace

std::optional<TimeFields> parse_time(std::string_view value, std::string_view format) {
  value = trim(value);
  format = trim(format);
  TimeFields f;
  std::optional<int> hour_i;
  std::optional<bool> pm;
  std::size_t vp = 0;
  for (std::size_t fp = 0; fp < format.size(); ++fp) {
    char fc = format[fp];
    if (is_ws(fc)) {
      while (vp < value.size() && is_ws(value[vp])) ++vp;
      continue;
    }
    if (fc != '%') {
      if (vp >= value.size() || value[vp] != fc) return std::nullopt;
      ++vp;
      continue;
    }
    if (++fp >= format.size()) return std::nullopt;
    std::optional<int> n;
    switch (format[fp]) {
      case 'Y':
        if (!(n = read_int(value, vp, 4, 4))) return std::nullopt;
        f.year = n;
        break;
      case 'y':
        if (!(n = read_int(value, vp, 2, 2))) return std::nullopt;
        f.year = *n < 69 ? 2000 + *n : 1900 + *n;
        break;
      case 'm':
        if (!(n = read_int(value, vp, 1, 2)) || *n < 1 || *n > 12) return std::nullopt;
        f.month = n;
        break;
      case 'd':
        if (!(n = read_int(value, vp, 1, 2)) || *n < 1 || *n > 31) return std::nullopt;
        f.day = n;
        break;
      case 'H':
        if (!(n = read_int(value, vp, 1, 2)) || *n > 23) return std::nullopt;
        f.hour24 = n;
        break;
      case 'I':
        if (!(n = read_int(value, vp, 1, 2)) || *n < 1 || *n > 12) return std::nullopt;
        hour_i = n;
        break;
      case 'M':
        if (!(n = read_int(value, vp, 1, 2)) || *n > 59) return std::nullopt;
        f.minute = n;
        break;
      case 'S':
        if (!(n = read_int(value, vp, 1, 2)) || *n > 61) return std::nullopt;
        f.second = n;
        break;
      case 'p':
        if (match_ci(value, vp, "a.m.")) {
          pm = false;
          vp += 4;
        } else if (match_ci(value, vp, "p.m.")) {
          pm = true;
          vp += 4;
        } else if (match_ci(value, vp, "am")) {
          pm = false;
          vp += 2;
        } else if (match_ci(value, vp, "pm")) {
          pm = true;
          vp += 2;
        } else {
          return std::nullopt;
        }
        break;
      case 'b':
      case 'B': {
        bool found = false;
        for (std::size_t m = 0; m < kMonths.size() && !found; ++m) {
          if (match_ci(value, vp, kMonths[m])) {
            vp += kMonths[m].size();
            found = true;
          } else if (match_ci(value, vp, kMonths[m].substr(0, 3))) {
            vp += 3;
            found = true;
          }
          if (found) f.month = static_cast<int>(m) + 1;
        }
        if (!found) return std::nullopt;
        break;
      }
      case '%':
        if (vp >= value.size() || value[vp] != '%') return std::nullopt;
        ++vp;
        break;
      default:
        return std::nullopt;
    }
  }
  if (vp != value.size()) return std::nullopt;
  if (hour_i) {
    if (f.hour24) return std::nullopt;
    if (pm) {
      f.hour24 = (*hour_i % 12) + (*pm ? 12 : 0);
    } else {
      f.hour12 = *hour_i % 12;
    }
  }
  if (f.month && f.day && *f.day > days_in_month(*f.month, f.year)) return std::nullopt;
  return f;
}

bool same_time(const TimeFields& a, const TimeFields& b) {
  bool shared = false;
  auto cmp = [&](const std::optional<int>& x, const std::optional<int>& y) {
    if (!x || !y) return true;
    shared = true;
    return *x == *y;
  };
  bool ok = cmp(a.year, b.year) && cmp(a.month, b.month) && cmp(a.day, b.day) &&
            cmp(a.minute, b.minute) && cmp(a.second, b.second);
  if (a.hour24 && b.hour24) {
    ok = ok && cmp(a.hour24, b.hour24);
  } else {
    auto h12 = [](const TimeFields& t) -> std::optional<int> {
      if (t.hour24) return *t.hour24 % 12;
      return t.hour12;
    };
    ok = ok && cmp(h12(a), h12(b));
  }
  return ok && shared;
}

double time_verify(std::string_view target, std::string_view tformat,
                   std::string_view predict, std::string_view pformat) {
  auto t = parse_time(target, tformat);
  if (!t || t->empty()) {
    throw Error(ErrorCode::FormatError, "target '" + std::string(target) +
                                            "' does not match format '" +
                                            std::string(tformat) + "'");
  }
  auto p = parse_time(predict, pformat);
  if (!p || p->empty()) return 0.0;
  return same_time(*t, *p) ? 1.0 : 0.0;
}

}  // namespace rubric_reward
