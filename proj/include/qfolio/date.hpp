#pragma once

#include <chrono>
#include <compare>
#include <optional>
#include <string>
#include <string_view>

namespace qfolio {

/// Calendar day. Ordering follows the calendar.
class Date {
 public:
  constexpr Date() = default;
  constexpr explicit Date(std::chrono::year_month_day ymd) : ymd_(ymd) {}

  /// Parses a strict ISO-8601 `YYYY-MM-DD`; nullopt on anything else.
  static std::optional<Date> parse(std::string_view text);

  std::string iso() const;
  constexpr std::chrono::year_month_day ymd() const { return ymd_; }

  friend constexpr bool operator==(const Date&, const Date&) = default;
  friend constexpr auto operator<=>(const Date& a, const Date& b) {
    return std::chrono::sys_days(a.ymd_) <=> std::chrono::sys_days(b.ymd_);
  }

 private:
  std::chrono::year_month_day ymd_{};
};

/// Inclusive calendar range [start, end].
struct DateRange {
  Date start;
  Date end;

  bool contains(const Date& d) const { return start <= d && d <= end; }
  friend bool operator==(const DateRange&, const DateRange&) = default;
};

/// Parses "YYYY-MM-DD:YYYY-MM-DD".
std::optional<DateRange> parse_range(std::string_view text);

}  // namespace qfolio
