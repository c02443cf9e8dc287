#include "rubric_reward/expr.hpp"

#include <cmath>

#include "rubric_reward/text.hpp"

namespace rubric_reward {

namespace {

using boost::multiprecision::cpp_int;

constexpr std::size_t kMaxLength = 4096;
constexpr int kMaxDepth = 128;
constexpr long kMaxExactExponent = 4096;
constexpr double kRelativeTolerance = 1e-9;
constexpr std::size_t kMaxExactBits = 1 << 16;

struct ParseFailure {};

std::string replace_all(std::string s, std::string_view from, std::string_view to) {
  std::size_t pos = 0;
  while ((pos = s.find(from, pos)) != std::string::npos) {
    s.replace(pos, from.size(), to);
    pos += to.size();
  }
  return s;
}

std::optional<cpp_int> exact_sqrt(const cpp_int& n) {
  if (n < 0) return std::nullopt;
  cpp_int r = boost::multiprecision::sqrt(n);
  if (r * r == n) return r;
  return std::nullopt;
}

double to_double(const Rational& q) { return q.convert_to<double>(); }

NumericValue make_approx(double d);

NumericValue make_exact(Rational q) {
  const auto& n = boost::multiprecision::numerator(q);
  const auto& d = boost::multiprecision::denominator(q);
  if ((n != 0 && boost::multiprecision::msb(abs(n)) > 4 * kMaxExactBits) ||
      boost::multiprecision::msb(d) > 4 * kMaxExactBits) {
    return make_approx(to_double(q));
  }
  NumericValue v;
  v.approx = to_double(q);
  v.exact = std::move(q);
  return v;
}

NumericValue make_approx(double d) {
  if (!std::isfinite(d)) throw ParseFailure{};
  NumericValue v;
  v.approx = d;
  return v;
}

class ExprParser {
 public:
  explicit ExprParser(std::string s) : s_(std::move(s)) {}

  NumericValue parse() {
    NumericValue v = sum();
    skip_ws();
    if (pos_ != s_.size()) throw ParseFailure{};
    return v;
  }

 private:
  void skip_ws() {
    while (pos_ < s_.size() && (s_[pos_] == ' ' || s_[pos_] == '\t')) ++pos_;
  }
  char peek() {
    skip_ws();
    return pos_ < s_.size() ? s_[pos_] : '\0';
  }
  bool consume(std::string_view tok) {
    skip_ws();
    if (s_.compare(pos_, tok.size(), tok) == 0) {
      pos_ += tok.size();
      return true;
    }
    return false;
  }

  struct DepthGuard {
    explicit DepthGuard(int& d) : d_(d) {
      if (++d_ > kMaxDepth) throw ParseFailure{};
    }
    ~DepthGuard() { --d_; }
    int& d_;
  };

  NumericValue sum() {
    DepthGuard guard(depth_);
    NumericValue acc = product();
    while (true) {
      if (consume("+")) {
        acc = add(acc, product(), false);
      } else if (consume("-")) {
        acc = add(acc, product(), true);
      } else {
        return acc;
      }
    }
  }

  NumericValue product() {
    NumericValue acc = unary();
    while (true) {
      if (consume("*")) {
        acc = mul(acc, unary());
      } else if (consume("/")) {
        acc = div(acc, unary());
      } else {
        return acc;
      }
    }
  }

  NumericValue unary() {
    DepthGuard guard(depth_);
    if (consume("-")) return neg(unary());
    if (consume("+")) return unary();
    return power();
  }

  NumericValue power() {
    NumericValue base = postfix();
    if (!consume("^")) return base;
    NumericValue exp;
    if (peek() == '{') {
      exp = group();
    } else if (consume("-")) {
      exp = neg(postfix());
    } else {
      exp = postfix();
    }
    return pow(base, exp);
  }

  NumericValue postfix() {
    NumericValue v = atom();
    while (consume("\\%") || consume("%")) {
      v = div(v, make_exact(Rational(100)));
    }
    return v;
  }

  NumericValue group() {
    if (!consume("{")) throw ParseFailure{};
    NumericValue v = sum();
    if (!consume("}")) throw ParseFailure{};
    return v;
  }

  NumericValue atom() {
    char c = peek();
    if (c == '(') {
      ++pos_;
      NumericValue v = sum();
      if (!consume(")")) throw ParseFailure{};
      return v;
    }
    if (c == '{') return group();
    if (consume("\\frac")) {
      NumericValue num = frac_arg();
      NumericValue den = frac_arg();
      return div(num, den);
    }
    if (consume("\\sqrt")) {
      NumericValue arg = peek() == '{' ? group() : atom();
      return sqrt(arg);
    }
    if ((c >= '0' && c <= '9') || c == '.') return number();
    throw ParseFailure{};
  }

  // \frac12 is valid LaTeX: a bare digit is a one-character argument.
  NumericValue frac_arg() {
    char c = peek();
    if (c == '{') return group();
    if (c >= '0' && c <= '9') {
      ++pos_;
      return make_exact(Rational(c - '0'));
    }
    throw ParseFailure{};
  }

  NumericValue number() {
    skip_ws();
    std::size_t start = pos_;
    cpp_int digits = 0;
    long scale = 0;
    bool any = false;
    while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) {
      digits = digits * 10 + (s_[pos_] - '0');
      ++pos_;
      any = true;
    }
    if (pos_ < s_.size() && s_[pos_] == '.') {
      ++pos_;
      while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) {
        digits = digits * 10 + (s_[pos_] - '0');
        ++scale;
        ++pos_;
        any = true;
      }
    }
    if (!any) throw ParseFailure{};
    long exponent = 0;
    if (pos_ < s_.size() && (s_[pos_] == 'e' || s_[pos_] == 'E')) {
      std::size_t save = pos_;
      ++pos_;
      bool negative = false;
      if (pos_ < s_.size() && (s_[pos_] == '+' || s_[pos_] == '-')) {
        negative = s_[pos_] == '-';
        ++pos_;
      }
      std::size_t exp_start = pos_;
      while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_])) &&
             pos_ - exp_start < 6) {
        exponent = exponent * 10 + (s_[pos_] - '0');
        ++pos_;
      }
      if (pos_ == exp_start) {
        pos_ = save;
      } else if (negative) {
        exponent = -exponent;
      }
    }
    (void)start;
    long power10 = exponent - scale;
    if (power10 > kMaxExactExponent || power10 < -kMaxExactExponent) throw ParseFailure{};
    cpp_int ten_pow = boost::multiprecision::pow(cpp_int(10), static_cast<unsigned>(std::labs(power10)));
    Rational q = power10 >= 0 ? Rational(digits * ten_pow) : Rational(digits, ten_pow);
    return make_exact(std::move(q));
  }

  static NumericValue add(const NumericValue& a, const NumericValue& b, bool subtract) {
    if (a.exact && b.exact) return make_exact(subtract ? Rational(*a.exact - *b.exact) : Rational(*a.exact + *b.exact));
    return make_approx(subtract ? a.approx - b.approx : a.approx + b.approx);
  }
  static NumericValue mul(const NumericValue& a, const NumericValue& b) {
    if (a.exact && b.exact) return make_exact(Rational(*a.exact * *b.exact));
    return make_approx(a.approx * b.approx);
  }
  static NumericValue div(const NumericValue& a, const NumericValue& b) {
    if (b.exact ? *b.exact == 0 : b.approx == 0.0) throw ParseFailure{};
    if (a.exact && b.exact) return make_exact(Rational(*a.exact / *b.exact));
    return make_approx(a.approx / b.approx);
  }
  static NumericValue neg(const NumericValue& a) {
    if (a.exact) return make_exact(-*a.exact);
    return make_approx(-a.approx);
  }
  static NumericValue sqrt(const NumericValue& a) {
    if (a.exact) {
      if (*a.exact < 0) throw ParseFailure{};
      auto n = exact_sqrt(boost::multiprecision::numerator(*a.exact));
      auto d = exact_sqrt(boost::multiprecision::denominator(*a.exact));
      if (n && d) return make_exact(Rational(*n, *d));
    }
    if (a.approx < 0) throw ParseFailure{};
    return make_approx(std::sqrt(a.approx));
  }
  static NumericValue pow(const NumericValue& base, const NumericValue& exp) {
    if (base.exact && exp.exact && boost::multiprecision::denominator(*exp.exact) == 1) {
      cpp_int k = boost::multiprecision::numerator(*exp.exact);
      if (k <= kMaxExactExponent && k >= -kMaxExactExponent) {
        long kk = k.convert_to<long>();
        if (kk < 0 && *base.exact == 0) throw ParseFailure{};
        auto e = static_cast<unsigned>(std::labs(kk));
        const auto& bn = boost::multiprecision::numerator(*base.exact);
        const auto& bd = boost::multiprecision::denominator(*base.exact);
        std::size_t bits = std::max(bn == 0 ? 0u : boost::multiprecision::msb(abs(bn)),
                                    boost::multiprecision::msb(bd)) + 1;
        if (bits * e > kMaxExactBits) {
          return make_approx(std::pow(base.approx, static_cast<double>(kk)));
        }
        Rational r(boost::multiprecision::pow(boost::multiprecision::numerator(*base.exact), e),
                   boost::multiprecision::pow(boost::multiprecision::denominator(*base.exact), e));
        if (kk < 0) r = 1 / r;
        return make_exact(std::move(r));
      }
    }
    if (base.approx < 0 && std::floor(exp.approx) != exp.approx) throw ParseFailure{};
    return make_approx(std::pow(base.approx, exp.approx));
  }

  std::string s_;
  std::size_t pos_ = 0;
  int depth_ = 0;
};

std::optional<char> option_letter(std::string_view s) {
  s = trim(s);
  if (s.size() == 3 && s.front() == '(' && s.back() == ')') s = s.substr(1, 1);
  if (s.size() == 1 && std::isalpha(static_cast<unsigned char>(s[0]))) {
    return static_cast<char>(std::toupper(static_cast<unsigned char>(s[0])));
  }
  return std::nullopt;
}

}  // namespace

std::optional<CanonicalExpr> parse_expression(std::string_view text) {
  if (text.size() > kMaxLength) return std::nullopt;
  std::string s = canonicalize_latex(text);
  if (auto letter = option_letter(s)) return OptionLetter{*letter};
  s = replace_all(std::move(s), "\xC3\x97", "*");       // ×
  s = replace_all(std::move(s), "\xC3\xB7", "/");       // ÷
  s = replace_all(std::move(s), "\xE2\x88\x92", "-");   // − (minus sign)
  s = replace_all(std::move(s), "\xC2\xB7", "*");       // ·
  s = replace_all(std::move(s), "\\times", "*");
  s = replace_all(std::move(s), "\\cdot", "*");
  s = replace_all(std::move(s), "\\div", "/");
  if (trim(s).empty()) return std::nullopt;
  try {
    return ExprParser(std::string(trim(s))).parse();
  } catch (const ParseFailure&) {
    return std::nullopt;
  } catch (const std::exception&) {
    // boost::multiprecision overflow or conversion errors.
    return std::nullopt;
  }
}

bool equivalent(const CanonicalExpr& a, const CanonicalExpr& b) {
  if (a.index() != b.index()) return false;
  if (auto* la = std::get_if<OptionLetter>(&a)) {
    return la->letter == std::get<OptionLetter>(b).letter;
  }
  const auto& na = std::get<NumericValue>(a);
  const auto& nb = std::get<NumericValue>(b);
  if (na.exact && nb.exact) return *na.exact == *nb.exact;
  double scale = std::max(std::fabs(na.approx), std::fabs(nb.approx));
  return std::fabs(na.approx - nb.approx) <= kRelativeTolerance * scale;
}

double expr_verify(std::string_view target, std::string_view predict) {
  auto t = parse_expression(target);
  if (!t) return 0.0;
  auto p = parse_expression(predict);
  if (!p) return 0.0;
  return equivalent(*t, *p) ? 1.0 : 0.0;
}

}  // namespace rubric_reward
