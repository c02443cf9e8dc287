#include <doctest.h>

#include "rubric_reward/expr.hpp"

using namespace rubric_reward;

TEST_CASE("equivalence examples") {
  CHECK(expr_verify("\\frac{4}{6}", "2/3") == 1.0);
  CHECK(expr_verify("B", "b") == 1.0);
  CHECK(expr_verify("0.5", "0.49") == 0.0);
}

TEST_CASE("numeric forms") {
  CHECK(expr_verify("50%", "0.5") == 1.0);
  CHECK(expr_verify("50\\%", "1/2") == 1.0);
  CHECK(expr_verify("\\sqrt{16}", "4") == 1.0);
  CHECK(expr_verify("-\\frac{1}{2}", "-0.5") == 1.0);
  CHECK(expr_verify("3\\times10^{4}", "30000") == 1.0);
  CHECK(expr_verify("3 × 10^4", "3e4") == 1.0);
  CHECK(expr_verify("1.50", "1.5") == 1.0);
  CHECK(expr_verify("$\\dfrac{3}{4}$", "0.75") == 1.0);
  CHECK(expr_verify("\\boxed{12}", "12") == 1.0);
  CHECK(expr_verify("(C)", "C") == 1.0);
  CHECK(expr_verify("2^{10}", "1024") == 1.0);
  CHECK(expr_verify("\\frac12", "0.5") == 1.0);
}

TEST_CASE("irrational values compare with relative tolerance") {
  CHECK(expr_verify("\\sqrt{2}", "\\sqrt{2}") == 1.0);
  CHECK(expr_verify("\\sqrt{2}", "1.414213") == 0.0);
  CHECK(expr_verify("\\sqrt{2}", "1.4142135623730951") == 1.0);
}

TEST_CASE("rejections") {
  CHECK(expr_verify("2", "") == 0.0);
  CHECK(expr_verify("2", "two") == 0.0);
  CHECK(expr_verify("A", "B") == 0.0);
  CHECK(expr_verify("1/0", "1/0") == 0.0);
  CHECK(expr_verify("A", "1") == 0.0);
  CHECK(expr_verify("10^999999999", "1") == 0.0);
  CHECK_FALSE(parse_expression("((((").has_value());
  CHECK_FALSE(parse_expression(std::string(10000, '(')).has_value());
}
