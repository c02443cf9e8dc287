#include <doctest.h>

#include <json.hpp>

#include "rubric_reward/audit.hpp"
#include "rubric_reward/error.hpp"

using namespace rubric_reward;

namespace {

const char* kRubric = R"J({"essential":[
  {"criterion":"Names the boiler type.","reference":"text_verify(target='Firetube Boiler')","weight":3},
  {"criterion":"Explains the trend.","reference":"Exports rise every year.","weight":2}],"additional":[]})J";

std::string output(const std::string& boiler, const std::string& trend) {
  return std::string(R"J({"thought":"","essential":[{"criterion":"Names the boiler type.","rationale":"","credit":"text_verify(predict=')J") +
         boiler + R"J(')"},{"criterion":"Explains the trend.","rationale":"","credit":)J" + trend +
         "}],\"additional\":[]}";
}

AuditRecord record(std::string id, AuditCategory cat, double c0, const std::string& extracted,
                   double c1, std::string genrm) {
  AuditRecord r;
  r.instance_id = std::move(id);
  r.rubric = parse_rubric(kRubric);
  r.category = cat;
  r.labels = {{c0, parse_call("text_verify(predict='" + extracted + "')")}, {c1, std::nullopt}};
  r.genrm_raw_output = std::move(genrm);
  return r;
}

}  // namespace

TEST_CASE("accuracy counts") {
  std::vector<AuditRecord> recs{
      // everything right
      record("a", AuditCategory::Regular, 1, "Firetube Boiler", 1,
             output("Firetube Boiler", "1")),
      // extraction right, credit wrong
      record("b", AuditCategory::Regular, 1, "Firetube Boiler", 0,
             output("Firetube Boiler", "1")),
      // unparseable
      record("c", AuditCategory::Regular, 1, "Firetube Boiler", 1, "{broken"),
      // path swapped on the first slot: execution fails there
      record("d", AuditCategory::Regular, 1, "Firetube Boiler", 1,
             [] {
               std::string s = output("x", "1");
               const std::string call = "\"text_verify(predict='x')\"";
               s.replace(s.find(call), call.size(), "1");
               return s;
             }()),
  };
  auto m = evaluate_genrm(recs);
  CHECK(m.records == 4);
  CHECK(m.schema.hits == 3);
  CHECK(m.schema.total == 4);
  CHECK(m.criterion.hits == 3);
  CHECK(m.execution.hits == 5);
  CHECK(m.execution.total == 8);
  CHECK(m.execution_per_record.hits == 2);
  CHECK(m.argument.hits == 2);
  CHECK(m.argument.total == 4);
  CHECK(m.credit.hits == 2);
  CHECK(m.credit.total == 4);
  CHECK(m.criterion_level.hits == 4);
  CHECK(m.sample_level.hits == 1);
  CHECK(*m.schema.percent() == doctest::Approx(75.0));
  CHECK(m.fpr_by_category.empty());
}

TEST_CASE("false positive rates") {
  std::vector<AuditRecord> recs{
      // the engine credits a target the response never stated
      record("n1", AuditCategory::NoFinalAnswer, 0, "", 0, output("Firetube Boiler", "0")),
      // partial judge credit counts as a false positive at threshold 0.5
      record("n2", AuditCategory::NoFinalAnswer, 0, "", 0, output("", "0.5")),
      record("adv", AuditCategory::Adversarial, 0, "Watertube", 1, output("Watertube", "1")),
      record("reg", AuditCategory::Regular, 0, "", 0, output("Firetube Boiler", "1")),
  };
  auto cell = false_positive_rate(recs, AuditCategory::NoFinalAnswer);
  CHECK(cell.average.hits == 2);
  CHECK(cell.average.total == 4);
  CHECK(cell.arguments.hits == 1);
  CHECK(cell.arguments.total == 2);
  CHECK(cell.credit.hits == 1);
  CHECK(cell.credit.total == 2);

  auto adv = false_positive_rate(recs, AuditCategory::Adversarial);
  CHECK(adv.average.total == 1);
  CHECK(adv.average.hits == 0);

  AuditConfig strict;
  strict.fp_threshold = 1.0;
  CHECK(false_positive_rate(recs, AuditCategory::NoFinalAnswer, strict).average.hits == 1);

  auto all = false_positive_rates(recs);
  CHECK(all.size() == 2);
  CHECK_FALSE(all.count(AuditCategory::Regular));

  try {
    false_positive_rate(recs, AuditCategory::Irrelevant);
    FAIL("expected EmptyCategory");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::EmptyCategory);
  }
}

TEST_CASE("empty audit set and reports") {
  try {
    evaluate_genrm(std::span<const AuditRecord>{});
    FAIL("expected EmptyAuditSet");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::EmptyAuditSet);
  }
  std::vector<AuditRecord> recs{record("n", AuditCategory::Irrelevant, 0, "", 0, output("", "0"))};
  auto m = evaluate_genrm(recs);
  auto j = nlohmann::json::parse(audit_report_json(m));
  CHECK(j["schema_acc"]["hits"] == 1);
  CHECK(j["fpr_by_category"]["irrelevant"]["average"]["percent"] == 0.0);
  std::string table = audit_report_table(m);
  CHECK(table.find("Sample-level") != std::string::npos);
  CHECK(table.find("irrelevant") != std::string::npos);
}

TEST_CASE("category names round trip") {
  for (auto c : {AuditCategory::Regular, AuditCategory::NoFinalAnswer, AuditCategory::Irrelevant,
                 AuditCategory::WrongButPlausible, AuditCategory::Adversarial}) {
    CHECK(audit_category_from_name(to_string(c)) == c);
  }
  CHECK_FALSE(audit_category_from_name("other"));
}
