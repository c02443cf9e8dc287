#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <variant>

#include <boost/multiprecision/cpp_int.hpp>

namespace rubric_reward {

using Rational = boost::multiprecision::cpp_rational;

/// A parsed numeric value. `exact` is unset when the value passed through
/// an irrational step (e.g. sqrt of a non-square).
struct NumericValue {
  std::optional<Rational> exact;
  double approx = 0.0;
};

struct OptionLetter {
  char letter = 'A';  // upper case
};

using CanonicalExpr = std::variant<OptionLetter, NumericValue>;

/// Parses option letters, integers, decimals, fractions, percentages and a
/// LaTeX numeric subset (\frac, \sqrt, unary minus, \times 10^k). Returns
/// nullopt if the text is outside that subset.
std::optional<CanonicalExpr> parse_expression(std::string_view text);

bool equivalent(const CanonicalExpr& a, const CanonicalExpr& b);

/// 1 iff both sides parse and are equivalent; 0 otherwise.
double expr_verify(std::string_view target, std::string_view predict);

}  // namespace rubric_reward
