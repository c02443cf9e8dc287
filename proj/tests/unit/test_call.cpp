#include <doctest.h>

#include "rubric_reward/call.hpp"
#include "rubric_reward/error.hpp"

using namespace rubric_reward;

namespace {

ErrorCode code_of(std::string_view text) {
  try {
    parse_call(text);
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an error for: " << text);
  return ErrorCode::IoError;
}

std::size_t offset_of(std::string_view text) {
  try {
    parse_call(text);
  } catch (const Error& e) {
    REQUIRE(e.offset().has_value());
    return *e.offset();
  }
  FAIL("expected an error");
  return 0;
}

}  // namespace

TEST_CASE("text call with flags") {
  auto c = parse_call("text_verify(target='Export Volume', ignore_space=True, ignore_case=True)");
  CHECK(c.name == VerifierName::Text);
  REQUIRE(c.args.size() == 3);
  CHECK(as_string(*c.find("target")) == "Export Volume");
  CHECK(as_bool(*c.find("ignore_space")) == true);
  CHECK(as_bool(*c.find("ignore_case")) == true);
}

TEST_CASE("bbox scoring call has one list-of-lists argument") {
  auto c = parse_call("bbox_verify(predict=[[529,119,890,433]])");
  CHECK(c.name == VerifierName::Bbox);
  REQUIRE(c.args.size() == 1);
  auto m = as_int_matrix(*c.find("predict"));
  REQUIRE(m);
  CHECK(*m == IntMatrix{{529, 119, 890, 433}});
}

TEST_CASE("positional arguments are rejected") {
  CHECK(code_of("text_verify('abc')") == ErrorCode::CallParseError);
}

TEST_CASE("grammar errors carry offsets") {
  CHECK(code_of("nope_verify(target='a')") == ErrorCode::CallParseError);
  CHECK(offset_of("nope_verify(target='a')") == 0);
  CHECK(code_of("text_verify(target='a', target='b')") == ErrorCode::CallParseError);
  CHECK(offset_of("text_verify(target='a', target='b')") == 24);
  CHECK(code_of("text_verify(target='a'") == ErrorCode::CallParseError);
  CHECK(code_of("list_verify(target=['a', 'b')") == ErrorCode::CallParseError);
  CHECK(code_of("expr_verify(target=1.5)") == ErrorCode::CallParseError);
  CHECK(code_of("text_verify(target='a') extra") == ErrorCode::CallParseError);
  CHECK(code_of("bbox_verify(target=[[[1]]])") == ErrorCode::CallParseError);
  CHECK(code_of("text_verify(bogus='a')") == ErrorCode::CallParseError);
  CHECK(code_of("") == ErrorCode::CallParseError);
}

TEST_CASE("string literals") {
  SUBCASE("double quotes and escapes") {
    auto c = parse_call(R"J(text_verify(predict="it's \"x\""))J");
    CHECK(as_string(*c.find("predict")) == "it's \"x\"");
  }
  SUBCASE("latex backslashes survive without a raw prefix") {
    auto c = parse_call(R"J(expr_verify(target='\frac{4}{6}'))J");
    CHECK(as_string(*c.find("target")) == "\\frac{4}{6}");
  }
  SUBCASE("raw prefix") {
    auto c = parse_call(R"J(expr_verify(target=r'\frac{4}{6}'))J");
    CHECK(as_string(*c.find("target")) == "\\frac{4}{6}");
  }
  SUBCASE("escaped backslash") {
    auto c = parse_call(R"J(text_verify(predict='a\\b'))J");
    CHECK(as_string(*c.find("predict")) == "a\\b");
  }
}

TEST_CASE("empty list and nested string lists") {
  auto c = parse_call("list_verify(predict=[])");
  CHECK(as_string_list(*c.find("predict"))->empty());
  auto d = parse_call("list_verify(candidates=[['a','b'],['c']])");
  CHECK(as_string_matrix(*d.find("candidates")) == StringMatrix{{"a", "b"}, {"c"}});
}

TEST_CASE("to_string round-trips") {
  const char* calls[] = {
      "text_verify(target='Export Volume', ignore_space=True, ignore_case=True)",
      "expr_verify(target='\\frac{4}{6}')",
      "time_verify(target='18:15', tformat='%H:%M')",
      "list_verify(target=['M-30', 'M-31', 'M-31UK'])",
      "bbox_verify(target=[[531, 118, 892, 435]])",
      "point_verify(predict=[[589, 236]])",
      "text_verify(predict='it\\'s')",
      "list_verify(predict=[])",
  };
  for (const char* text : calls) {
    auto c = parse_call(text);
    CHECK(parse_call(to_string(c)) == c);
  }
}

TEST_CASE("call sides") {
  CHECK_NOTHROW(check_call_side(parse_call("text_verify(target='a')"), CallSide::Target));
  CHECK_THROWS_AS(check_call_side(parse_call("text_verify(predict='a')"), CallSide::Target), Error);
  CHECK_THROWS_AS(check_call_side(parse_call("text_verify(target='a', candidates=['b'])"),
                                  CallSide::Target),
                  Error);
  CHECK_THROWS_AS(check_call_side(parse_call("time_verify(predict='1')"), CallSide::Predict),
                  Error);
  CHECK_NOTHROW(check_call_side(parse_call("time_verify(predict='1', pformat='%H')"),
                                CallSide::Predict));
}

TEST_CASE("merge") {
  auto t = parse_call("text_verify(target='a', ignore_case=True)");
  auto p = parse_call("text_verify(predict='A')");
  auto m = merge_calls(t, p);
  CHECK(m.args.size() == 3);
  try {
    merge_calls(t, parse_call("text_verify(target='b')"));
    FAIL("expected MergeConflict");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::MergeConflict);
  }
  CHECK_THROWS_AS(merge_calls(t, parse_call("expr_verify(predict='1')")), Error);
}

TEST_CASE("signatures never contain values") {
  for (VerifierName v : kAllVerifiers) {
    CHECK(scoring_signature(v).find("predict") != std::string::npos);
    CHECK(rubric_signature(v).find(std::string(name_of(v))) == 0);
  }
}

TEST_CASE("leading verifier name") {
  CHECK(leading_verifier_name("  expr_verify(predict='1')") == VerifierName::Expr);
  CHECK_FALSE(leading_verifier_name("the answer is 3").has_value());
}
