#include "proxweb/core/time.hpp"

#include <charconv>
#include <cstdio>

#include "proxweb/core/error.hpp"

namespace proxweb {
namespace {

[[noreturn]] void bad_time(std::string_view text, const char* why) {
  throw Error(ErrorCode::InvalidTimestamp,
              "invalid timestamp '" + std::string(text) + "': " + why,
              std::string(text));
}

int read_digits(std::string_view text, std::size_t at, std::size_t n,
                std::string_view whole) {
  if (at + n > text.size()) bad_time(whole, "truncated");
  int value = 0;
  for (std::size_t i = at; i < at + n; ++i) {
    const char c = text[i];
    if (c < '0' || c > '9') bad_time(whole, "expected digit");
    value = value * 10 + (c - '0');
  }
  return value;
}

void expect_char(std::string_view text, std::size_t at, char c,
                 std::string_view whole) {
  if (at >= text.size() || text[at] != c) bad_time(whole, "unexpected separator");
}

}  // namespace

std::string format_rfc3339(Timestamp t) {
  using namespace std::chrono;
  const auto day = floor<days>(t);
  const year_month_day ymd{day};
  const hh_mm_ss hms{t - day};
  char buf[32];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02uT%02d:%02d:%02dZ",
                static_cast<int>(ymd.year()), static_cast<unsigned>(ymd.month()),
                static_cast<unsigned>(ymd.day()),
                static_cast<int>(hms.hours().count()),
                static_cast<int>(hms.minutes().count()),
                static_cast<int>(hms.seconds().count()));
  return buf;
}

Timestamp parse_rfc3339(std::string_view text) {
  using namespace std::chrono;
  const int y = read_digits(text, 0, 4, text);
  expect_char(text, 4, '-', text);
  const int mo = read_digits(text, 5, 2, text);
  expect_char(text, 7, '-', text);
  const int d = read_digits(text, 8, 2, text);
  if (text.size() <= 10 || (text[10] != 'T' && text[10] != 't' && text[10] != ' ')) {
    bad_time(text, "missing time part");
  }
  const int h = read_digits(text, 11, 2, text);
  expect_char(text, 13, ':', text);
  const int mi = read_digits(text, 14, 2, text);
  expect_char(text, 16, ':', text);
  const int s = read_digits(text, 17, 2, text);

  std::size_t at = 19;
  if (at < text.size() && text[at] == '.') {
    ++at;
    const std::size_t start = at;
    while (at < text.size() && text[at] >= '0' && text[at] <= '9') ++at;
    if (at == start) bad_time(text, "empty fraction");
  }

  int offset_minutes = 0;
  if (at >= text.size()) bad_time(text, "missing zone designator");
  if (text[at] == 'Z' || text[at] == 'z') {
    ++at;
  } else if (text[at] == '+' || text[at] == '-') {
    const int sign = text[at] == '+' ? 1 : -1;
    const int oh = read_digits(text, at + 1, 2, text);
    expect_char(text, at + 3, ':', text);
    const int om = read_digits(text, at + 4, 2, text);
    if (oh > 23 || om > 59) bad_time(text, "offset out of range");
    offset_minutes = sign * (oh * 60 + om);
    at += 6;
  } else {
    bad_time(text, "bad zone designator");
  }
  if (at != text.size()) bad_time(text, "trailing characters");

  const year_month_day ymd{year{y}, month{static_cast<unsigned>(mo)},
                           day{static_cast<unsigned>(d)}};
  if (!ymd.ok()) bad_time(text, "no such date");
  if (h > 23 || mi > 59 || s > 60) bad_time(text, "time out of range");

  return sys_days{ymd} + hours{h} + minutes{mi} + seconds{s} -
         minutes{offset_minutes};
}

Timestamp parse_time_arg(std::string_view text) {
  if (text.empty()) bad_time(text, "empty");
  std::int64_t value = 0;
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec == std::errc{} && ptr == end) return from_epoch_seconds(value);
  return parse_rfc3339(text);
}

Timestamp now_utc() {
  return std::chrono::floor<Seconds>(std::chrono::system_clock::now());
}

}  // namespace proxweb
