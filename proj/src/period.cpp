#include "macrostate/period.hpp"

#include <cctype>
#include <cstdio>

#include "macrostate/error.hpp"

namespace macrostate {

namespace {

bool all_digits(std::string_view s) {
  if (s.empty()) return false;
  for (char c : s) {
    if (!std::isdigit(static_cast<unsigned char>(c))) return false;
  }
  return true;
}

int to_int(std::string_view s) {
  int v = 0;
  for (char c : s) v = v * 10 + (c - '0');
  return v;
}

}  // namespace

const char* to_string(Granularity g) {
  return g == Granularity::monthly ? "monthly" : "quarterly";
}

PeriodLabel PeriodLabel::parse(std::string_view text) {
  // "YYYY-MM" or "YYYY-Qn"
  if (text.size() != 7 || text[4] != '-') {
    fail(ErrorKind::parse, "malformed date '" + std::string(text) + "' (expected YYYY-MM or YYYY-Qn)");
  }
  std::string_view year_part = text.substr(0, 4);
  if (!all_digits(year_part)) {
    fail(ErrorKind::parse, "malformed date '" + std::string(text) + "': bad year");
  }
  PeriodLabel label;
  label.year = to_int(year_part);
  if (text[5] == 'Q') {
    std::string_view q = text.substr(6, 1);
    if (!all_digits(q) || to_int(q) < 1 || to_int(q) > 4) {
      fail(ErrorKind::parse, "malformed date '" + std::string(text) + "': quarter out of range");
    }
    label.sub = to_int(q);
    label.granularity = Granularity::quarterly;
  } else {
    std::string_view m = text.substr(5, 2);
    if (!all_digits(m) || to_int(m) < 1 || to_int(m) > 12) {
      fail(ErrorKind::parse, "malformed date '" + std::string(text) + "': month out of range");
    }
    label.sub = to_int(m);
    label.granularity = Granularity::monthly;
  }
  return label;
}

std::string PeriodLabel::str() const {
  char buf[16];
  if (granularity == Granularity::monthly) {
    std::snprintf(buf, sizeof buf, "%04d-%02d", year, sub);
  } else {
    std::snprintf(buf, sizeof buf, "%04d-Q%d", year, sub);
  }
  return buf;
}

int PeriodLabel::quarter() const {
  return granularity == Granularity::quarterly ? sub : (sub - 1) / 3 + 1;
}

}  // namespace macrostate
