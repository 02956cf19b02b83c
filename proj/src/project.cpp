#include "hope/project.hpp"

#include <algorithm>
#include <charconv>

#include "hope/error.hpp"

namespace hope {

const Engine* AnnotationProject::find_engine(std::string_view engine_id) const noexcept {
  auto it = std::find_if(engines.begin(), engines.end(), [&](const Engine& e) { return e.engine_id == engine_id; });
  return it == engines.end() ? nullptr : &*it;
}

const TranslationUnit* AnnotationProject::find_unit(std::string_view unit_id) const noexcept {
  auto it = std::find_if(units.begin(), units.end(), [&](const TranslationUnit& u) { return u.id == unit_id; });
  return it == units.end() ? nullptr : &*it;
}

TranslationUnit* AnnotationProject::find_unit(std::string_view unit_id) noexcept {
  auto it = std::find_if(units.begin(), units.end(), [&](const TranslationUnit& u) { return u.id == unit_id; });
  return it == units.end() ? nullptr : &*it;
}

namespace {

void put_digits(std::string& out, long value, int width) {
  std::string digits = std::to_string(value);
  if (static_cast<int>(digits.size()) < width) {
    out.append(static_cast<std::size_t>(width) - digits.size(), '0');
  }
  out += digits;
}

int read_digits(std::string_view s, std::size_t pos, std::size_t width) {
  int value = 0;
  const char* first = s.data() + pos;
  auto [ptr, ec] = std::from_chars(first, first + width, value);
  if (ec != std::errc{} || ptr != first + width) {
    throw DataError("malformed timestamp: " + std::string(s));
  }
  return value;
}

}  // namespace

std::string format_timestamp(Timestamp t) {
  using namespace std::chrono;
  const auto day = floor<days>(t);
  const year_month_day ymd{day};
  const hh_mm_ss hms{t - day};
  std::string out;
  put_digits(out, static_cast<int>(ymd.year()), 4);
  out += '-';
  put_digits(out, static_cast<unsigned>(ymd.month()), 2);
  out += '-';
  put_digits(out, static_cast<unsigned>(ymd.day()), 2);
  out += 'T';
  put_digits(out, hms.hours().count(), 2);
  out += ':';
  put_digits(out, hms.minutes().count(), 2);
  out += ':';
  put_digits(out, static_cast<long>(hms.seconds().count()), 2);
  out += 'Z';
  return out;
}

Timestamp parse_timestamp(std::string_view s) {
  using namespace std::chrono;
  if (s.size() != 20 || s[4] != '-' || s[7] != '-' || s[10] != 'T' || s[13] != ':' || s[16] != ':' || s[19] != 'Z') {
    throw DataError("malformed timestamp: " + std::string(s));
  }
  const year_month_day ymd{year{read_digits(s, 0, 4)}, month{static_cast<unsigned>(read_digits(s, 5, 2))},
                           day{static_cast<unsigned>(read_digits(s, 8, 2))}};
  const int h = read_digits(s, 11, 2);
  const int m = read_digits(s, 14, 2);
  const int sec = read_digits(s, 17, 2);
  if (!ymd.ok() || h > 23 || m > 59 || sec > 59) {
    throw DataError("timestamp out of range: " + std::string(s));
  }
  return sys_days{ymd} + hours{h} + minutes{m} + seconds{sec};
}

Timestamp now_utc() { return std::chrono::floor<std::chrono::seconds>(std::chrono::system_clock::now()); }

}  // namespace hope
