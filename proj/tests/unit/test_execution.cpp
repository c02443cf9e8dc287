#include <doctest.h>

#include <atomic>

#include "rubric_reward/error.hpp"
#include "rubric_reward/execution.hpp"

using namespace rubric_reward;

namespace {

const char* kRubric = R"J({"essential":[
  {"criterion":"Names the boiler type.","reference":"text_verify(target='Firetube Boiler')","weight":3},
  {"criterion":"Explains the trend.","reference":"Exports rise every year.","weight":2}],
  "additional":[{"criterion":"Gives the ratio.","reference":"expr_verify(target='\\frac{4}{6}')","weight":1}]})J";

const char* kScoring = R"J({"thought":"t","essential":[
  {"criterion":"Names the boiler type.","rationale":"r1","credit":"text_verify(predict='Firetube Boiler')"},
  {"criterion":"Explains the trend.","rationale":"r2","credit":1}],
  "additional":[{"criterion":"Gives the ratio.","rationale":"r3","credit":"expr_verify(predict='2/3')"}]})J";

TaskInstance task() {
  return {"inst-1", "Which boiler is shown?", "img://secret-image-42",
          "It looks like a large industrial unit.", 12};
}

ErrorCode error_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an error");
  return ErrorCode::IoError;
}

}  // namespace

TEST_CASE("minimal extractor request hides the target") {
  Rubric r = parse_rubric(kRubric);
  auto req = assemble_context(task(), r.essential[0], Role::Extractor);
  std::string all = req.serialized();
  CHECK(all.find("text_verify") != std::string::npos);
  CHECK(all.find(task().response) != std::string::npos);
  CHECK(all.find("Firetube Boiler") == std::string::npos);
  CHECK(all.find("img://secret-image-42") == std::string::npos);
  CHECK(find_exposure_leaks(req, rubric_target_literals(r), task().image_ref).empty());
}

TEST_CASE("judge request carries the reference text and no image") {
  Rubric r = parse_rubric(kRubric);
  auto req = assemble_context(task(), r.essential[1], Role::Judge);
  CHECK(req.user.find("Exports rise every year.") != std::string::npos);
  CHECK(req.serialized().find("img://") == std::string::npos);
}

TEST_CASE("unlimited extractor request includes the target") {
  Rubric r = parse_rubric(kRubric);
  ExposurePolicy p{ExposureMode::Unlimited, false};
  auto req = assemble_context(task(), r.essential[0], Role::Extractor, p);
  CHECK(req.user.find("Firetube Boiler") != std::string::npos);
  CHECK_FALSE(find_exposure_leaks(req, rubric_target_literals(r)).empty());
}

TEST_CASE("role mismatch and policy validation") {
  Rubric r = parse_rubric(kRubric);
  CHECK(error_of([&] { assemble_context(task(), r.essential[1], Role::Extractor); }) ==
        ErrorCode::RoleMismatch);
  CHECK(error_of([&] { assemble_context(task(), r.essential[0], Role::Judge); }) ==
        ErrorCode::RoleMismatch);
  CHECK(error_of([&] {
          assemble_context(task(), r.essential[1], Role::Judge, {ExposureMode::Minimal, true});
        }) == ErrorCode::ArgumentError);
}

TEST_CASE("answers inside the response are not counted as leaks") {
  Rubric r = parse_rubric(kRubric);
  TaskInstance t = task();
  t.response = "This is a Firetube Boiler.";
  auto req = assemble_scoring_request(t, r);
  CHECK(req.user.find("Firetube Boiler") != std::string::npos);
  CHECK(find_exposure_leaks(req, rubric_target_literals(r)).empty());
}

TEST_CASE("word-bounded literal matching") {
  CHECK(contains_literal("Answer: B.", "B"));
  CHECK_FALSE(contains_literal("Because", "B"));
  CHECK(contains_literal("x=\\frac{4}{6}", "\\frac{4}{6}"));
}

TEST_CASE("execute_criterion") {
  Rubric r = parse_rubric(kRubric);
  auto boiler = parse_rubric(
      R"J({"essential":[{"criterion":"c","reference":"text_verify(target='Boiler')","weight":1}],"additional":[]})J");
  CriterionRecord empty{"c", "none", parse_call("text_verify(predict='')")};
  auto s = execute_criterion(boiler.essential[0], empty);
  CHECK(s.raw == 0.0);
  CHECK(s.path == ScorePath::Verifier);
  REQUIRE(s.call);

  CriterionRecord judged{"Explains the trend.", "ok", DiscreteCredit{1.0}};
  auto j = execute_criterion(r.essential[1], judged);
  CHECK(j.raw == 1.0);
  CHECK(j.path == ScorePath::Judge);
  CHECK_FALSE(j.call);

  CriterionRecord ratio{"Gives the ratio.", "", parse_call("expr_verify(predict='2/3')")};
  CHECK(execute_criterion(r.additional[0], ratio).raw == 1.0);

  CHECK(error_of([&] { execute_criterion(r.essential[0], judged); }) == ErrorCode::PairingError);

  auto bad = parse_rubric(
      R"J({"essential":[{"criterion":"c","reference":"time_verify(target='xx', tformat='%H:%M')","weight":1}],"additional":[]})J");
  CriterionRecord t{"c", "", parse_call("time_verify(predict='18:15', pformat='%H:%M')")};
  CHECK(error_of([&] { execute_criterion(bad.essential[0], t); }) == ErrorCode::VerifierError);
}

TEST_CASE("score_response") {
  Rubric r = parse_rubric(kRubric);
  auto scores = score_response(r, parse_scoring(kScoring));
  REQUIRE(scores.size() == 3);
  CHECK(scores[0].raw == 1.0);
  CHECK(scores[1].raw == 1.0);
  CHECK(scores[2].raw == 1.0);

  std::string raw = kScoring;
  raw.replace(raw.find("\"text_verify(predict='Firetube Boiler')\""), 40, "1");
  auto wrong_path = parse_scoring(raw);
  auto lenient = score_response(r, wrong_path, PairingMode::Lenient);
  CHECK(lenient[0].raw == 0.0);
  CHECK(lenient[0].mismatched);
  CHECK(lenient[0].path == ScorePath::Verifier);
  CHECK(lenient[1].raw == 1.0);
  CHECK(error_of([&] { score_response(r, wrong_path, PairingMode::Strict); }) ==
        ErrorCode::PairingError);
}

TEST_CASE("request_scoring retries parse failures") {
  Rubric r = parse_rubric(kRubric);
  std::atomic<int> calls{0};
  FunctionTransport flaky([&](const GenerationRequest&) {
    return GenerationReply{++calls <= 2 ? "{not json" : kScoring, "stop"};
  });
  auto result = request_scoring(task(), r, flaky);
  CHECK(result.attempts == 3);
  CHECK(result.output == parse_scoring(kScoring));

  calls = 0;
  ScoringRequestOptions one;
  one.retries = 1;
  CHECK(error_of([&] { request_scoring(task(), r, flaky, one); }) ==
        ErrorCode::ParseFailureAfterRetries);

  FunctionTransport echo([&](const GenerationRequest&) { return GenerationReply{kScoring, "stop"}; });
  CHECK(request_scoring(task(), r, echo).attempts == 1);
}

TEST_CASE("transport timeouts carry the instance id") {
  Rubric r = parse_rubric(kRubric);
  FunctionTransport down([](const GenerationRequest&) -> GenerationReply {
    throw Error(ErrorCode::TransportError, "timeout");
  });
  try {
    request_scoring(task(), r, down);
    FAIL("expected TransportError");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::TransportError);
    CHECK(std::string(e.what()).find("inst-1") != std::string::npos);
  }
}

TEST_CASE("one request scores the whole rubric") {
  Rubric r = parse_rubric(kRubric);
  auto req = assemble_scoring_request(task(), r);
  CHECK(req.user.find("Names the boiler type.") != std::string::npos);
  CHECK(req.user.find("Explains the trend.") != std::string::npos);
  CHECK(req.user.find("Gives the ratio.") != std::string::npos);
  CHECK(req.system.find("expr_verify") != std::string::npos);
  CHECK(req.system.find("bbox_verify") == std::string::npos);
}
