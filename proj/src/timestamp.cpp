#include "powlmine/timestamp.hpp"

#include <cstdio>

namespace powlmine {
namespace {

using namespace std::chrono;

struct Fields {
  int year = 1970;
  unsigned month = 1;
  unsigned day = 1;
  int hour = 0;
  int minute = 0;
  int second = 0;
  long long micros = 0;
  int offset_minutes = 0;
};

class Cursor {
 public:
  explicit Cursor(std::string_view s) : s_(s) {}

  bool done() const { return pos_ == s_.size(); }
  char peek() const { return done() ? '\0' : s_[pos_]; }

  bool consume(char c) {
    if (peek() != c) return false;
    ++pos_;
    return true;
  }

  // Exactly `n` decimal digits.
  bool digits(int n, int& out) {
    if (s_.size() - pos_ < static_cast<std::size_t>(n)) return false;
    int v = 0;
    for (int i = 0; i < n; ++i) {
      char c = s_[pos_ + i];
      if (c < '0' || c > '9') return false;
      v = v * 10 + (c - '0');
    }
    pos_ += n;
    out = v;
    return true;
  }

  // One to nine digits, scaled to microseconds.
  bool fraction(long long& micros) {
    std::size_t start = pos_;
    long long v = 0;
    int used = 0;
    while (!done() && peek() >= '0' && peek() <= '9') {
      if (pos_ - start >= 9) return false;
      if (used < 6) {
        v = v * 10 + (peek() - '0');
        ++used;
      }
      ++pos_;
    }
    if (pos_ == start) return false;
    for (; used < 6; ++used) v *= 10;
    micros = v;
    return true;
  }

  bool zone(int& offset_minutes) {
    if (consume('Z') || consume('z')) {
      offset_minutes = 0;
      return true;
    }
    int sign = 0;
    if (consume('+')) {
      sign = 1;
    } else if (consume('-')) {
      sign = -1;
    } else {
      return false;
    }
    int hh = 0;
    int mm = 0;
    if (!digits(2, hh)) return false;
    if (consume(':')) {
      if (!digits(2, mm)) return false;
    } else if (!done() && peek() >= '0' && peek() <= '9') {
      if (!digits(2, mm)) return false;
    }
    if (hh > 23 || mm > 59) return false;
    offset_minutes = sign * (hh * 60 + mm);
    return true;
  }

 private:
  std::string_view s_;
  std::size_t pos_ = 0;
};

std::optional<Timestamp> assemble(const Fields& f) {
  year_month_day ymd{year{f.year}, month{f.month}, day{f.day}};
  if (!ymd.ok()) return std::nullopt;
  if (f.hour > 23 || f.minute > 59 || f.second > 60) return std::nullopt;
  Timestamp t = sys_days{ymd};
  t += hours{f.hour} + minutes{f.minute} + seconds{f.second} + microseconds{f.micros};
  t -= minutes{f.offset_minutes};
  return t;
}

}  // namespace

std::optional<Timestamp> parse_iso8601(std::string_view text) {
  while (!text.empty() && (text.front() == ' ' || text.front() == '\t')) text.remove_prefix(1);
  while (!text.empty() && (text.back() == ' ' || text.back() == '\t')) text.remove_suffix(1);
  Cursor c{text};
  Fields f;
  int month = 0;
  int day = 0;
  if (!c.digits(4, f.year) || !c.consume('-') || !c.digits(2, month) || !c.consume('-') ||
      !c.digits(2, day)) {
    return std::nullopt;
  }
  f.month = static_cast<unsigned>(month);
  f.day = static_cast<unsigned>(day);
  if (c.done()) return assemble(f);
  if (!c.consume('T') && !c.consume('t') && !c.consume(' ')) return std::nullopt;
  if (!c.digits(2, f.hour) || !c.consume(':') || !c.digits(2, f.minute)) return std::nullopt;
  if (c.consume(':')) {
    if (!c.digits(2, f.second)) return std::nullopt;
    if (c.consume('.') || c.consume(',')) {
      if (!c.fraction(f.micros)) return std::nullopt;
    }
  }
  if (!c.done() && !c.zone(f.offset_minutes)) return std::nullopt;
  if (!c.done()) return std::nullopt;
  return assemble(f);
}

std::optional<Timestamp> parse_timestamp(std::string_view text, std::string_view pattern) {
  if (pattern.empty()) return parse_iso8601(text);
  Cursor c{text};
  Fields f;
  for (std::size_t i = 0; i < pattern.size(); ++i) {
    char p = pattern[i];
    if (p != '%') {
      if (!c.consume(p)) return std::nullopt;
      continue;
    }
    if (++i == pattern.size()) return std::nullopt;
    int v = 0;
    switch (pattern[i]) {
      case 'Y':
        if (!c.digits(4, f.year)) return std::nullopt;
        break;
      case 'm':
        if (!c.digits(2, v)) return std::nullopt;
        f.month = static_cast<unsigned>(v);
        break;
      case 'd':
        if (!c.digits(2, v)) return std::nullopt;
        f.day = static_cast<unsigned>(v);
        break;
      case 'H':
        if (!c.digits(2, f.hour)) return std::nullopt;
        break;
      case 'M':
        if (!c.digits(2, f.minute)) return std::nullopt;
        break;
      case 'S':
        if (!c.digits(2, f.second)) return std::nullopt;
        break;
      case 'f':
        if (!c.fraction(f.micros)) return std::nullopt;
        break;
      case 'z':
        if (!c.zone(f.offset_minutes)) return std::nullopt;
        break;
      case '%':
        if (!c.consume('%')) return std::nullopt;
        break;
      default:
        return std::nullopt;
    }
  }
  if (!c.done()) return std::nullopt;
  return assemble(f);
}

std::string format_iso8601(Timestamp t) {
  auto day_point = floor<days>(t);
  year_month_day ymd{day_point};
  hh_mm_ss<microseconds> tod{t - day_point};
  char buf[48];
  long long frac = tod.subseconds().count();
  if (frac == 0) {
    std::snprintf(buf, sizeof buf, "%04d-%02u-%02uT%02lld:%02lld:%02lldZ", int(ymd.year()),
                  unsigned(ymd.month()), unsigned(ymd.day()),
                  static_cast<long long>(tod.hours().count()),
                  static_cast<long long>(tod.minutes().count()),
                  static_cast<long long>(tod.seconds().count()));
  } else {
    std::snprintf(buf, sizeof buf, "%04d-%02u-%02uT%02lld:%02lld:%02lld.%06lldZ",
                  int(ymd.year()), unsigned(ymd.month()), unsigned(ymd.day()),
                  static_cast<long long>(tod.hours().count()),
                  static_cast<long long>(tod.minutes().count()),
                  static_cast<long long>(tod.seconds().count()), frac);
  }
  return buf;
}

}  // namespace powlmine
