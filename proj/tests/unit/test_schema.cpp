#include <doctest.h>

#include "rubric_reward/error.hpp"
#include "rubric_reward/schema.hpp"

using namespace rubric_reward;

namespace {

ErrorCode rubric_error(std::string_view raw) {
  try {
    parse_rubric(raw);
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an error");
  return ErrorCode::IoError;
}

ErrorCode scoring_error(std::string_view raw) {
  try {
    parse_scoring(raw);
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an error");
  return ErrorCode::IoError;
}

const char* kRubric = R"J({"essential":[
  {"criterion":"States the final option.","reference":"expr_verify(target='B')","weight":3},
  {"criterion":"Explains the trend.","reference":"Exports rise every year.","weight":2}],
  "additional":[{"criterion":"Reads the axis label.","reference":"text_verify(target='Export Volume', ignore_case=True)","weight":1}]})J";

const char* kScoring = R"J({"thought":"ok","essential":[
  {"criterion":"States the final option.","rationale":"r","credit":"expr_verify(predict='b')"},
  {"criterion":"Explains the trend.","rationale":"r","credit":0.5}],
  "additional":[{"criterion":"Reads the axis label.","rationale":"r","credit":"text_verify(predict='export volume')"}]})J";

}  // namespace

TEST_CASE("rubric with one verifiable essential criterion") {
  auto r = parse_rubric(
      R"J({"essential":[{"criterion":"States the final option.","reference":"expr_verify(target='B')","weight":3}],"additional":[]})J");
  REQUIRE(r.essential.size() == 1);
  CHECK(r.additional.empty());
  REQUIRE(r.essential[0].call());
  CHECK(r.essential[0].call()->name == VerifierName::Expr);
  CHECK(r.essential[0].weight == 3);
}

TEST_CASE("rubric errors") {
  CHECK(rubric_error(R"J({"essential":[],"additional":[]})J") == ErrorCode::SchemaViolation);
  CHECK(rubric_error(R"J({"essential":[{"criterion":"x","reference":"gt text","weight":4}],"additional":[]})J") ==
        ErrorCode::SchemaViolation);
  CHECK(rubric_error(R"J({"essential":[{"criterion":"x","reference":"gt text","weight":1.5}],"additional":[]})J") ==
        ErrorCode::SchemaViolation);
  CHECK(rubric_error("{\"essential\": [") == ErrorCode::MalformedDocument);
  CHECK(rubric_error("[1,2]") == ErrorCode::SchemaViolation);
  CHECK(rubric_error(R"J({"essential":[{"criterion":"x","weight":1}],"additional":[]})J") ==
        ErrorCode::SchemaViolation);
  CHECK(rubric_error(R"J({"essential":[{"criterion":"x","reference":"text_verify(target=)","weight":1}],"additional":[]})J") ==
        ErrorCode::CallParseError);
  CHECK(rubric_error(R"J({"essential":[{"criterion":"x","reference":"text_verify(predict='a')","weight":1}],"additional":[]})J") ==
        ErrorCode::SchemaViolation);
  CHECK(rubric_error(R"J({"essential":[{"criterion":"x","reference":"a","weight":1},{"criterion":" x ","reference":"b","weight":1}],"additional":[]})J") ==
        ErrorCode::SchemaViolation);
  CHECK(rubric_error(R"J({"essential":[{"criterion":"  ","reference":"a","weight":1}],"additional":[]})J") ==
        ErrorCode::SchemaViolation);
}

TEST_CASE("unknown fields are ignored and not re-emitted") {
  auto r = parse_rubric(
      R"J({"essential":[{"criterion":"x","reference":"gt","weight":1,"note":"n"}],"additional":[],"meta":1})J");
  CHECK(serialize_rubric(r).find("note") == std::string::npos);
}

TEST_CASE("rubric round trip") {
  auto r = parse_rubric(kRubric);
  CHECK(parse_rubric(serialize_rubric(r)) == r);
}

TEST_CASE("scoring credits") {
  auto s = parse_scoring(kScoring);
  CHECK(std::get<DiscreteCredit>(s.essential[1].credit).value == 0.5);
  REQUIRE(s.essential[0].call());
  CHECK(s.essential[0].call()->name == VerifierName::Expr);

  auto empty = parse_scoring(
      R"J({"thought":"","essential":[{"criterion":"c","rationale":"","credit":"text_verify(predict='')"}],"additional":[]})J");
  CHECK(as_string(*empty.essential[0].call()->find("predict")) == "");

  CHECK(scoring_error(
            R"J({"thought":"","essential":[{"criterion":"c","rationale":"","credit":0.7}],"additional":[]})J") ==
        ErrorCode::CreditDomainError);
  CHECK(scoring_error(
            R"J({"thought":"","essential":[{"criterion":"c","rationale":"","credit":"great"}],"additional":[]})J") ==
        ErrorCode::SchemaViolation);
  CHECK(scoring_error(
            R"J({"thought":"","essential":[{"criterion":"c","rationale":"","credit":"text_verify(predict=)"}],"additional":[]})J") ==
        ErrorCode::CallParseError);
  CHECK(scoring_error(
            R"J({"thought":"","essential":[{"criterion":"c","rationale":"","credit":"text_verify(target='a')"}],"additional":[]})J") ==
        ErrorCode::CallParseError);
}

TEST_CASE("credit accepts integer and decimal spellings") {
  for (const char* v : {"0", "0.0", "1", "1.0", "0.5"}) {
    std::string raw = std::string(R"J({"thought":"","essential":[{"criterion":"c","rationale":"","credit":)J") +
                      v + "}],\"additional\":[]}";
    CHECK_NOTHROW(parse_scoring(raw));
  }
  CHECK_THROWS_AS(make_credit(-0.5), Error);
  CHECK_THROWS_AS(make_credit(2.0), Error);
}

TEST_CASE("lenient scoring keeps malformed calls") {
  auto s = parse_scoring(
      R"J({"thought":"","essential":[{"criterion":"c","rationale":"","credit":"text_verify(predict=)"}],"additional":[]})J",
      CallStrictness::Lenient);
  CHECK(std::holds_alternative<MalformedCall>(s.essential[0].credit));
}

TEST_CASE("pairing") {
  auto r = parse_rubric(kRubric);
  SUBCASE("matching pair") {
    auto report = validate_pairing(r, parse_scoring(kScoring));
    CHECK(report.ok());
    CHECK(report.lengths_match);
  }
  SUBCASE("credit on a verifier slot") {
    std::string raw = kScoring;
    raw.replace(raw.find("\"expr_verify(predict='b')\""), 26, "1");
    auto report = validate_pairing(r, parse_scoring(raw));
    CHECK_FALSE(report.slots[0].execution_match);
    CHECK(report.slots[0].slot_match);
    CHECK_FALSE(report.all_execution_match);
  }
  SUBCASE("paraphrased criterion") {
    std::string raw = kScoring;
    raw.replace(raw.find("Explains the trend."), 19, "Explains the trends.");
    auto report = validate_pairing(r, parse_scoring(raw));
    CHECK_FALSE(report.slots[1].slot_match);
    CHECK(report.slots[1].execution_match);
    CHECK_FALSE(report.all_slots_match);
  }
  SUBCASE("surrounding whitespace is trimmed") {
    std::string raw = kScoring;
    raw.replace(raw.find("\"Explains the trend.\""), 21, "\"  Explains the trend. \"");
    CHECK(validate_pairing(r, parse_scoring(raw)).ok());
  }
  SUBCASE("wrong verifier name") {
    std::string raw = kScoring;
    raw.replace(raw.find("expr_verify(predict='b')"), 24, "text_verify(predict='b')");
    CHECK_FALSE(validate_pairing(r, parse_scoring(raw)).slots[0].execution_match);
  }
  SUBCASE("missing record") {
    auto s = parse_scoring(kScoring);
    s.additional.clear();
    auto report = validate_pairing(r, s);
    CHECK_FALSE(report.lengths_match);
    CHECK_FALSE(report.slots[2].present);
  }
}
