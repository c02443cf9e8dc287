#include "rubric_reward/batch.hpp"

#include <fstream>
#include <iostream>

#include "rubric_reward/error.hpp"

namespace rubric_reward {

using nlohmann::json;

std::vector<InputLine> read_lines(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoError, "cannot open " + path.string());
  std::vector<InputLine> out;
  std::string line;
  std::size_t n = 0;
  while (std::getline(in, line)) {
    ++n;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    out.push_back({n, std::move(line)});
  }
  if (in.bad()) throw Error(ErrorCode::IoError, "read failed on " + path.string());
  return out;
}

void write_lines(const std::filesystem::path& path, const std::vector<std::string>& lines) {
  if (path == "-") {
    for (const auto& l : lines) std::cout << l << '\n';
    std::cout.flush();
    return;
  }
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw Error(ErrorCode::IoError, "cannot write " + path.string());
  for (const auto& l : lines) out << l << '\n';
  if (!out) throw Error(ErrorCode::IoError, "write failed on " + path.string());
}

json parse_line(const InputLine& line) {
  json j = json::parse(line.text, nullptr, false);
  if (j.is_discarded() || !j.is_object()) {
    throw Error(ErrorCode::MalformedDocument,
                "line " + std::to_string(line.lineno) + " is not a JSON object");
  }
  return j;
}

namespace {

const json& require(const json& j, std::string_view key) {
  auto it = j.find(key);
  if (it == j.end()) {
    throw Error(ErrorCode::SchemaViolation, "missing field '" + std::string(key) + "'");
  }
  return *it;
}

std::string document_text(const json& v) { return v.is_string() ? v.get<std::string>() : v.dump(); }

}  // namespace

Rubric rubric_field(const json& j, std::string_view key) {
  return parse_rubric(document_text(require(j, key)));
}

std::string text_field(const json& j, std::string_view key) {
  const json& v = require(j, key);
  if (!v.is_string()) {
    throw Error(ErrorCode::SchemaViolation, "field '" + std::string(key) + "' must be a string");
  }
  return v.get<std::string>();
}

TaskInstance task_from_json(const json& j) {
  TaskInstance t;
  t.id = j.contains("id") ? document_text(j["id"]) : "";
  t.prompt_text = j.value("prompt", "");
  t.image_ref = j.value("image_ref", "");
  t.response = j.value("response", "");
  t.response_length = j.value("response_length", static_cast<std::int64_t>(0));
  return t;
}

CriterionLabel label_from_json(const json& j) {
  CriterionLabel label;
  const json& credit = require(j, "credit");
  if (!credit.is_number()) throw Error(ErrorCode::SchemaViolation, "label credit must be a number");
  label.credit = make_credit(credit.get<double>()).value;
  if (auto it = j.find("extracted"); it != j.end() && !it->is_null()) {
    if (!it->is_string()) {
      throw Error(ErrorCode::SchemaViolation, "label 'extracted' must be a call string");
    }
    VerifierCall call = parse_call(it->get<std::string>());
    check_call_side(call, CallSide::Predict);
    label.extracted = std::move(call);
  }
  return label;
}

ordered_json label_to_json(const CriterionLabel& label) {
  ordered_json j;
  j["credit"] = label.credit;
  j["extracted"] = label.extracted ? ordered_json(to_string(*label.extracted)) : ordered_json();
  return j;
}

AuditRecord audit_record_from_json(const json& j) {
  AuditRecord r;
  r.instance_id = document_text(require(j, "id"));
  r.rubric = rubric_field(j, "rubric");
  r.response = j.value("response", "");
  std::string cat = j.value("category", "regular");
  auto parsed = audit_category_from_name(cat);
  if (!parsed) throw Error(ErrorCode::SchemaViolation, "unknown audit category '" + cat + "'");
  r.category = *parsed;
  const json& labels = require(j, "labels");
  if (!labels.is_array()) throw Error(ErrorCode::SchemaViolation, "'labels' must be an array");
  for (const json& l : labels) r.labels.push_back(label_from_json(l));
  if (r.labels.size() != r.rubric.size()) {
    throw Error(ErrorCode::SchemaViolation, "record " + r.instance_id + " has " +
                                                std::to_string(r.labels.size()) + " labels for " +
                                                std::to_string(r.rubric.size()) + " criteria");
  }
  for (std::size_t k = 0; k < r.labels.size(); ++k) {
    if (r.rubric.at(k).verifiable() != r.labels[k].extracted.has_value()) {
      throw Error(ErrorCode::SchemaViolation,
                  "record " + r.instance_id + " label " + std::to_string(k) +
                      ": extraction must be present exactly for verifiable criteria");
    }
  }
  r.genrm_raw_output = j.value("genrm_output", "");
  return r;
}

ordered_json audit_record_to_json(const AuditRecord& r) {
  ordered_json j;
  j["id"] = r.instance_id;
  j["category"] = std::string(to_string(r.category));
  j["rubric"] = ordered_json::parse(serialize_rubric(r.rubric));
  j["response"] = r.response;
  ordered_json labels = ordered_json::array();
  for (const auto& l : r.labels) labels.push_back(label_to_json(l));
  j["labels"] = labels;
  j["genrm_output"] = r.genrm_raw_output;
  return j;
}

ordered_json criterion_score_to_json(const CriterionScore& s) {
  ordered_json j;
  j["raw"] = s.raw;
  j["path"] = std::string(to_string(s.path));
  j["call"] = s.call ? ordered_json(to_string(*s.call)) : ordered_json();
  j["mismatched"] = s.mismatched;
  j["rationale"] = s.rationale;
  return j;
}

ordered_json breakdown_to_json(const RewardBreakdown& b) {
  ordered_json j;
  j["raw"] = b.raw;
  j["remapped"] = b.remapped;
  j["base"] = b.base;
  j["content_mask"] = b.content_mask;
  j["format_mask"] = b.format_mask;
  j["length_exceeded"] = b.length_exceeded;
  j["final"] = b.final;
  j["advantage"] = b.advantage;
  return j;
}

}  // namespace rubric_reward
