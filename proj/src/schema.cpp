#include "rubric_reward/schema.hpp"

#include <set>

#include <json.hpp>

#include "rubric_reward/error.hpp"
#include "rubric_reward/text.hpp"

namespace rubric_reward {

using nlohmann::json;

namespace {

json parse_document(std::string_view raw) {
  json doc = json::parse(raw.begin(), raw.end(), nullptr, /*allow_exceptions=*/false);
  if (doc.is_discarded()) {
    throw Error(ErrorCode::MalformedDocument, "not a valid JSON document");
  }
  if (!doc.is_object()) {
    throw Error(ErrorCode::SchemaViolation, "top-level value must be an object");
  }
  return doc;
}

const json& require_field(const json& obj, const char* key, const std::string& where) {
  auto it = obj.find(key);
  if (it == obj.end()) {
    throw Error(ErrorCode::SchemaViolation, where + ": missing field '" + key + "'");
  }
  return *it;
}

const std::string& require_string(const json& obj, const char* key,
                                  const std::string& where) {
  const json& v = require_field(obj, key, where);
  if (!v.is_string()) {
    throw Error(ErrorCode::SchemaViolation, where + ": '" + key + "' must be a string");
  }
  return v.get_ref<const std::string&>();
}

const json& require_array(const json& obj, const char* key) {
  const json& v = require_field(obj, key, "document");
  if (!v.is_array()) {
    throw Error(ErrorCode::SchemaViolation, std::string("'") + key + "' must be an array");
  }
  return v;
}

Criterion parse_criterion(const json& item, CriterionType ctype, const std::string& where) {
  if (!item.is_object()) {
    throw Error(ErrorCode::SchemaViolation, where + ": criterion must be an object");
  }
  Criterion c;
  c.ctype = ctype;
  c.description = require_string(item, "criterion", where);
  if (trim(c.description).empty()) {
    throw Error(ErrorCode::SchemaViolation, where + ": empty criterion description");
  }
  const json& weight = require_field(item, "weight", where);
  if (!weight.is_number_integer()) {
    throw Error(ErrorCode::SchemaViolation, where + ": weight must be an integer");
  }
  auto w = weight.get<std::int64_t>();
  if (w < 1 || w > 3) {
    throw Error(ErrorCode::SchemaViolation,
                where + ": weight " + std::to_string(w) + " outside {1,2,3}");
  }
  c.weight = static_cast<int>(w);
  const std::string& ref = require_string(item, "reference", where);
  if (leading_verifier_name(ref)) {
    VerifierCall call = parse_call(ref);
    try {
      check_call_side(call, CallSide::Target);
    } catch (const Error& e) {
      throw Error(ErrorCode::SchemaViolation, where + ": " + e.what());
    }
    c.reference = std::move(call);
  } else {
    c.reference = GroundTruthText{ref};
  }
  return c;
}

Credit parse_credit(const json& v, CallStrictness calls, const std::string& where) {
  if (v.is_number()) return make_credit(v.get<double>());
  if (v.is_string()) {
    const auto& text = v.get_ref<const std::string&>();
    if (!leading_verifier_name(text)) {
      throw Error(ErrorCode::SchemaViolation,
                  where + ": credit string is not a verifier call");
    }
    try {
      VerifierCall call = parse_call(text);
      check_call_side(call, CallSide::Predict);
      return call;
    } catch (const Error& e) {
      if (calls == CallStrictness::Strict) throw;
      return MalformedCall{text, e.what()};
    }
  }
  throw Error(ErrorCode::SchemaViolation,
              where + ": credit must be a number or a call string");
}

CriterionRecord parse_record(const json& item, CallStrictness calls,
                             const std::string& where) {
  if (!item.is_object()) {
    throw Error(ErrorCode::SchemaViolation, where + ": record must be an object");
  }
  CriterionRecord r;
  r.criterion = require_string(item, "criterion", where);
  r.rationale = require_string(item, "rationale", where);
  r.credit = parse_credit(require_field(item, "credit", where), calls, where);
  return r;
}

json credit_json(const Credit& credit) {
  if (auto* d = std::get_if<DiscreteCredit>(&credit)) {
    if (d->value == 0.5) return 0.5;
    return static_cast<int>(d->value);
  }
  if (auto* c = std::get_if<VerifierCall>(&credit)) return to_string(*c);
  return std::get<MalformedCall>(credit).text;
}

bool execution_matches(const Criterion& criterion, const CriterionRecord& record) {
  const VerifierCall* ref_call = criterion.call();
  if (!ref_call) return std::holds_alternative<DiscreteCredit>(record.credit);
  if (const VerifierCall* c = record.call()) return c->name == ref_call->name;
  if (auto* m = std::get_if<MalformedCall>(&record.credit)) {
    return leading_verifier_name(m->text) == ref_call->name;
  }
  return false;
}

}  // namespace

std::string_view to_string(CriterionType t) {
  return t == CriterionType::Essential ? "essential" : "additional";
}

const Criterion& Rubric::at(std::size_t flat) const {
  return flat < essential.size() ? essential[flat]
                                 : additional.at(flat - essential.size());
}

DiscreteCredit make_credit(double value) {
  if (value == 0.0 || value == 0.5 || value == 1.0) return DiscreteCredit{value};
  throw Error(ErrorCode::CreditDomainError,
              "credit " + json(value).dump() + " outside {0, 0.5, 1}");
}

Rubric parse_rubric(std::string_view raw) {
  json doc = parse_document(raw);
  Rubric rubric;
  const json& ess = require_array(doc, "essential");
  const json& add = require_array(doc, "additional");
  for (std::size_t i = 0; i < ess.size(); ++i) {
    rubric.essential.push_back(
        parse_criterion(ess[i], CriterionType::Essential, "essential[" + std::to_string(i) + "]"));
  }
  for (std::size_t i = 0; i < add.size(); ++i) {
    rubric.additional.push_back(parse_criterion(add[i], CriterionType::Additional,
                                                "additional[" + std::to_string(i) + "]"));
  }
  if (rubric.essential.empty()) {
    throw Error(ErrorCode::SchemaViolation, "rubric needs at least one essential criterion");
  }
  std::set<std::string> seen;
  for (std::size_t k = 0; k < rubric.size(); ++k) {
    if (!seen.insert(std::string(trim(rubric.at(k).description))).second) {
      throw Error(ErrorCode::SchemaViolation,
                  "duplicate criterion '" + rubric.at(k).description + "'");
    }
  }
  return rubric;
}

ScoringOutput parse_scoring(std::string_view raw, CallStrictness calls) {
  json doc = parse_document(raw);
  ScoringOutput out;
  out.thought = require_string(doc, "thought", "document");
  const json& ess = require_array(doc, "essential");
  const json& add = require_array(doc, "additional");
  for (std::size_t i = 0; i < ess.size(); ++i) {
    out.essential.push_back(parse_record(ess[i], calls, "essential[" + std::to_string(i) + "]"));
  }
  for (std::size_t i = 0; i < add.size(); ++i) {
    out.additional.push_back(parse_record(add[i], calls, "additional[" + std::to_string(i) + "]"));
  }
  return out;
}

std::string serialize_rubric(const Rubric& rubric) {
  auto dump = [](const std::vector<Criterion>& list) {
    nlohmann::ordered_json arr = nlohmann::ordered_json::array();
    for (const auto& c : list) {
      nlohmann::ordered_json item;
      item["criterion"] = c.description;
      if (const VerifierCall* call = c.call()) {
        item["reference"] = to_string(*call);
      } else {
        item["reference"] = std::get<GroundTruthText>(c.reference).text;
      }
      item["weight"] = c.weight;
      arr.push_back(std::move(item));
    }
    return arr;
  };
  nlohmann::ordered_json doc;
  doc["essential"] = dump(rubric.essential);
  doc["additional"] = dump(rubric.additional);
  return doc.dump();
}

std::string serialize_scoring(const ScoringOutput& scoring) {
  auto dump = [](const std::vector<CriterionRecord>& list) {
    nlohmann::ordered_json arr = nlohmann::ordered_json::array();
    for (const auto& r : list) {
      nlohmann::ordered_json item;
      item["criterion"] = r.criterion;
      item["rationale"] = r.rationale;
      item["credit"] = credit_json(r.credit);
      arr.push_back(std::move(item));
    }
    return arr;
  };
  nlohmann::ordered_json doc;
  doc["thought"] = scoring.thought;
  doc["essential"] = dump(scoring.essential);
  doc["additional"] = dump(scoring.additional);
  return doc.dump();
}

const CriterionRecord* record_at(const ScoringOutput& scoring, const Rubric& rubric,
                                 std::size_t flat) {
  if (flat < rubric.essential.size()) {
    return flat < scoring.essential.size() ? &scoring.essential[flat] : nullptr;
  }
  std::size_t j = flat - rubric.essential.size();
  return j < scoring.additional.size() ? &scoring.additional[j] : nullptr;
}

PairingReport validate_pairing(const Rubric& rubric, const ScoringOutput& scoring) {
  PairingReport report;
  report.lengths_match = rubric.essential.size() == scoring.essential.size() &&
                         rubric.additional.size() == scoring.additional.size();
  bool slots = report.lengths_match;
  bool exec = report.lengths_match;
  bool calls = true;
  for (std::size_t k = 0; k < rubric.size(); ++k) {
    SlotCheck check;
    const Criterion& c = rubric.at(k);
    if (const CriterionRecord* r = record_at(scoring, rubric, k)) {
      check.present = true;
      check.slot_match = trim(r->criterion) == trim(c.description);
      check.execution_match = execution_matches(c, *r);
      check.call_valid = !std::holds_alternative<MalformedCall>(r->credit);
    }
    slots = slots && check.slot_match;
    exec = exec && check.execution_match;
    report.slots.push_back(check);
  }
  auto all_valid = [](const std::vector<CriterionRecord>& list) {
    for (const auto& r : list) {
      if (std::holds_alternative<MalformedCall>(r.credit)) return false;
    }
    return true;
  };
  calls = all_valid(scoring.essential) && all_valid(scoring.additional);
  report.all_slots_match = slots;
  report.all_execution_match = exec;
  report.all_calls_valid = calls;
  return report;
}

}  // namespace rubric_reward
