#pragma once

#include <string>
#include <string_view>

namespace macrostate {

enum class Granularity { monthly, quarterly };

const char* to_string(Granularity g);

/// A monthly or quarterly period. Serialized "YYYY-MM" / "YYYY-Qn".
struct PeriodLabel {
  int year = 0;
  int sub = 1;  // month 1-12 or quarter 1-4
  Granularity granularity = Granularity::monthly;

  static PeriodLabel parse(std::string_view text);

  std::string str() const;

  /// Calendar quarter this period falls in (Q1 = Jan-Mar).
  int quarter() const;

  friend bool operator==(const PeriodLabel& a, const PeriodLabel& b) {
    return a.year == b.year && a.sub == b.sub && a.granularity == b.granularity;
  }
  friend bool operator!=(const PeriodLabel& a, const PeriodLabel& b) { return !(a == b); }
  friend bool operator<(const PeriodLabel& a, const PeriodLabel& b) {
    if (a.year != b.year) return a.year < b.year;
    if (a.sub != b.sub) return a.sub < b.sub;
    return a.granularity < b.granularity;
  }
};

}  // namespace macrostate
