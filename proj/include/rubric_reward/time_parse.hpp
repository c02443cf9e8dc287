#pragma once

#include <optional>
#include <string_view>

namespace rubric_reward {

/// Fields populated by a strptime-style format. `hour12` holds an hour read
/// with %I when no %p was present, and compares modulo 12.
struct TimeFields {
  std::optional<int> year;
  std::optional<int> month;
  std::optional<int> day;
  std::optional<int> hour24;
  std::optional<int> hour12;
  std::optional<int> minute;
  std::optional<int> second;

  bool empty() const {
    return !year && !month && !day && !hour24 && !hour12 && !minute && !second;
  }
};

/// Supports %Y %y %m %d %H %I %M %S %p %b %B %%. Whitespace in the format
/// matches any run of whitespace (including none). Returns nullopt when the
/// value does not match or a field is out of range.
std::optional<TimeFields> parse_time(std::string_view value, std::string_view format);

/// True iff both share at least one populated field and agree on every
/// field they share.
bool same_time(const TimeFields& a, const TimeFields& b);

/// Throws Error{FormatError} when the target/tformat pair does not parse.
double time_verify(std::string_view target, std::string_view tformat,
                   std::string_view predict, std::string_view pformat);

}  // namespace rubric_reward
