#include <doctest.h>

#include "rubric_reward/error.hpp"
#include "rubric_reward/genrm.hpp"

using namespace rubric_reward;

namespace {

const char* kRubric = R"J({"essential":[
  {"criterion":"Names the boiler type.","reference":"text_verify(target='Firetube Boiler')","weight":3},
  {"criterion":"Explains the trend.","reference":"Exports rise every year.","weight":2}],
  "additional":[{"criterion":"Gives the time.","reference":"time_verify(target='18:15', tformat='%H:%M')","weight":1}]})J";

std::string scoring(const std::string& boiler, const std::string& trend, const std::string& time) {
  return std::string(R"J({"thought":"t","essential":[)J") +
         R"J({"criterion":"Names the boiler type.","rationale":"","credit":"text_verify(predict=')J" +
         boiler + R"J(')"},)J" + R"J({"criterion":"Explains the trend.","rationale":"","credit":)J" +
         trend + "}]," + R"J("additional":[{"criterion":"Gives the time.","rationale":"","credit":"time_verify(predict=')J" +
         time + R"J(', pformat='%I:%M %p')"}]})J";
}

TeacherScoring teacher(std::string id, const std::string& raw) {
  return {std::move(id), parse_scoring(raw)};
}

}  // namespace

TEST_CASE("discretize and lower median") {
  CHECK(discretize_score(0.49) == 0.0);
  CHECK(discretize_score(0.5) == 0.5);
  CHECK(discretize_score(0.99) == 0.5);
  CHECK(discretize_score(1.0) == 1.0);
  CHECK(lower_median({0, 0.5, 1}) == 0.5);
  CHECK(lower_median({0, 1}) == 0.0);
  CHECK(lower_median({1, 1, 0, 0.5}) == 0.5);
  CHECK(lower_median({1}) == 1.0);
  try {
    lower_median({});
    FAIL("expected NoMatchingTeacher");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::NoMatchingTeacher);
  }
}

TEST_CASE("teacher labels take the lower median and its first extraction") {
  Rubric r = parse_rubric(kRubric);
  std::vector<TeacherScoring> t{
      teacher("t1", scoring("Firetube Boiler", "1", "06:15 PM")),
      teacher("t2", scoring("Steam", "0", "07:15 PM")),
      teacher("t3", scoring("Firetube Boilr", "0.5", "06:15 PM")),
  };
  auto labels = aggregate_teacher_labels(t, r);
  REQUIRE(labels.size() == 3);
  // text credits {1, 0, 0.5}: median 0.5, from t3
  CHECK(labels[0].credit == 0.5);
  REQUIRE(labels[0].extracted);
  CHECK(as_string(*labels[0].extracted->find("predict")) == "Firetube Boilr");
  CHECK(labels[1].credit == 0.5);
  CHECK_FALSE(labels[1].extracted);
  // time credits {1, 0, 1}: median 1, from t1
  CHECK(labels[2].credit == 1.0);
  REQUIRE(labels[2].extracted);
  CHECK(as_string(*labels[2].extracted->find("predict")) == "06:15 PM");
  CHECK(as_string(*labels[2].extracted->find("pformat")) == "%I:%M %p");
}

TEST_CASE("unpaired teacher slots are excluded") {
  Rubric r = parse_rubric(kRubric);
  std::string wrong = scoring("Steam", "0", "07:15 PM");
  const std::string call = "\"text_verify(predict='Steam')\"";
  wrong.replace(wrong.find(call), call.size(), "1");
  std::vector<TeacherScoring> t{
      teacher("good", scoring("Firetube Boiler", "1", "06:15 PM")),
      teacher("bad", wrong),
  };
  LabelDiagnostics diag;
  auto labels = aggregate_teacher_labels(t, r, {}, &diag);
  CHECK(labels[0].credit == 1.0);
  CHECK(labels[1].credit == 0.0);
  REQUIRE(diag.excluded.size() == 1);
  CHECK(diag.excluded[0].rfind("bad: 0", 0) == 0);

  std::vector<TeacherScoring> only_bad{teacher("bad", wrong)};
  CHECK_THROWS_AS(aggregate_teacher_labels(only_bad, r), Error);
}

TEST_CASE("format reward") {
  Rubric r = parse_rubric(kRubric);
  CHECK(format_reward(scoring("x", "1", "06:15 PM"), r) == 1);
  CHECK(format_reward("not json", r) == 0);
  CHECK(format_reward(scoring("x", "0.3", "06:15 PM"), r) == 0);
  std::string renamed = scoring("x", "1", "06:15 PM");
  renamed.replace(renamed.find("Explains the trend."), 19, "Explains the trend");
  CHECK(format_reward(renamed, r) == 0);
}

TEST_CASE("content reward compares extractions and credits") {
  Rubric r = parse_rubric(kRubric);
  std::vector<CriterionLabel> labels{
      {0.0, parse_call("text_verify(predict='Watertube Steam Boiler')")},
      {1.0, std::nullopt},
      {1.0, parse_call("time_verify(predict='18:15', pformat='%H:%M')")},
  };
  auto same = genrm_reward(scoring("Watertube Steam Boiler", "1", "06:15 PM"), labels, r);
  CHECK(same.format == 1);
  CHECK(same.content == 1.0);
  CHECK(same.total() == 1.0);

  // near-identical text passes the similarity bar, a different time does not
  auto s = parse_scoring(scoring("watertube boiler!", "0", "06:16 PM"));
  auto ok = criterion_correctness(s, labels, r);
  CHECK(ok == std::vector<bool>{false, false, false});
  auto close = parse_scoring(scoring("Watertube Steam Boilers", "1", "06:15 PM"));
  CHECK(criterion_correctness(close, labels, r) == std::vector<bool>{true, true, true});
  CHECK(content_reward(s, labels, r) == 0.0);
  CHECK(genrm_reward("{", labels, r).total() == 0.0);
}

TEST_CASE("empty label extractions fall back to literal equality") {
  auto r = parse_rubric(
      R"J({"essential":[{"criterion":"c","reference":"bbox_verify(target=[[0,0,10,10]])","weight":1}],"additional":[]})J");
  const Criterion& c = r.essential[0];
  auto empty = parse_call("bbox_verify(predict=[])");
  CHECK(extraction_agreement(c, empty, empty) == 1.0);
  CHECK(extraction_agreement(c, empty, parse_call("bbox_verify(predict=[[0,0,10,10]])")) == 0.0);
  auto box = parse_call("bbox_verify(predict=[[0,0,10,10]])");
  CHECK(extraction_agreement(c, box, parse_call("bbox_verify(predict=[[0,0,10,9]])")) ==
        doctest::Approx(0.9));
}
