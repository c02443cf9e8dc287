#include "rubric_reward/audit_builder.hpp"

#include "rubric_reward/batch.hpp"
#include "rubric_reward/error.hpp"
#include "rubric_reward/prompts.hpp"

namespace rubric_reward {

using nlohmann::json;

FailureAssignment assign_failure(std::size_t index) {
  static constexpr AuditCategory kCycle[] = {
      AuditCategory::NoFinalAnswer, AuditCategory::Irrelevant, AuditCategory::WrongButPlausible,
      AuditCategory::Adversarial};
  FailureAssignment a;
  a.category = kCycle[index % 4];
  switch (a.category) {
    case AuditCategory::NoFinalAnswer: a.instruction_asset = "failure_no_final_answer"; break;
    case AuditCategory::Irrelevant: a.instruction_asset = "failure_irrelevant"; break;
    case AuditCategory::WrongButPlausible:
      a.instruction_asset = "failure_wrong_but_plausible";
      break;
    default: {
      static constexpr std::pair<AttackPattern, const char*> kPatterns[] = {
          {AttackPattern::AuthoritativeCircumlocution, "attack_authoritative_circumlocution"},
          {AttackPattern::SymbolicBluff, "attack_symbolic_bluff"},
          {AttackPattern::IncorrectSelection, "attack_incorrect_selection"}};
      const auto& [pattern, asset] = kPatterns[(index / 4) % 3];
      a.pattern = pattern;
      a.instruction_asset = asset;
    }
  }
  return a;
}

std::optional<std::string> tagged_section(std::string_view text, std::string_view tag) {
  std::string open = "<" + std::string(tag) + ">";
  std::string close = "</" + std::string(tag) + ">";
  std::size_t b = text.find(open);
  if (b == std::string_view::npos) return std::nullopt;
  b += open.size();
  std::size_t e = text.find(close, b);
  if (e == std::string_view::npos) return std::nullopt;
  return std::string(trim(text.substr(b, e - b)));
}

namespace {

std::optional<Literal> string_list_literal(const json& v) {
  if (v.is_string()) {
    std::string s = v.get<std::string>();
    if (trim(s).empty()) return Literal{EmptyList{}};
    return Literal{StringList{s}};
  }
  if (!v.is_array()) return std::nullopt;
  if (v.empty()) return Literal{EmptyList{}};
  StringList out;
  for (const json& e : v) {
    if (!e.is_string()) return std::nullopt;
    out.push_back(e.get<std::string>());
  }
  return Literal{out};
}

std::optional<Literal> coordinate_literal(const json& v) {
  if (v.is_string() && trim(v.get<std::string>()).empty()) return Literal{EmptyList{}};
  if (!v.is_array()) return std::nullopt;
  if (v.empty()) return Literal{EmptyList{}};
  auto row = [](const json& r) -> std::optional<IntList> {
    if (!r.is_array()) return std::nullopt;
    IntList out;
    for (const json& e : r) {
      if (!e.is_number_integer()) return std::nullopt;
      out.push_back(e.get<std::int64_t>());
    }
    return out;
  };
  IntMatrix m;
  if (v.front().is_number()) {
    auto r = row(v);
    if (!r) return std::nullopt;
    m.push_back(*r);
  } else {
    for (const json& r : v) {
      auto parsed = row(r);
      if (!parsed) return std::nullopt;
      m.push_back(*parsed);
    }
  }
  return Literal{m};
}

std::string scalar_text(const json& v) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_null()) return "";
  return v.dump();
}

}  // namespace

std::optional<VerifierCall> extraction_call(const Criterion& criterion, const json& annotation) {
  const VerifierCall* target = criterion.call();
  if (!target) return std::nullopt;
  json value = annotation.is_object() ? annotation.value("extracted_value", json()) : annotation;

  VerifierCall call;
  call.name = target->name;
  if (value.is_string() && leading_verifier_name(value.get<std::string>())) {
    try {
      call = parse_call(value.get<std::string>());
    } catch (const Error&) {
      return std::nullopt;
    }
  } else {
    switch (target->name) {
      case VerifierName::Text:
      case VerifierName::Expr:
        call.args.emplace_back("predict", scalar_text(value));
        break;
      case VerifierName::Time: {
        call.args.emplace_back("predict", scalar_text(value));
        std::string fmt;
        if (annotation.is_object() && annotation.contains("pformat")) {
          fmt = scalar_text(annotation["pformat"]);
        } else if (auto t = as_string(*target->find("tformat"))) {
          fmt = *t;
        }
        call.args.emplace_back("pformat", fmt);
        break;
      }
      case VerifierName::List: {
        auto lit = value.is_null() ? std::optional<Literal>(EmptyList{}) : string_list_literal(value);
        if (!lit) return std::nullopt;
        call.args.emplace_back("predict", *lit);
        break;
      }
      case VerifierName::Bbox:
      case VerifierName::Point: {
        auto lit = value.is_null() ? std::optional<Literal>(EmptyList{}) : coordinate_literal(value);
        if (!lit) return std::nullopt;
        call.args.emplace_back("predict", *lit);
        break;
      }
    }
  }
  if (call.name != target->name) return std::nullopt;
  try {
    check_call_side(call, CallSide::Predict);
  } catch (const Error&) {
    return std::nullopt;
  }
  return call;
}

std::vector<std::string> leaked_targets(const Rubric& rubric,
                                        const std::vector<CriterionLabel>& labels,
                                        std::string_view response) {
  std::vector<std::string> out;
  for (std::size_t k = 0; k < rubric.size() && k < labels.size(); ++k) {
    const VerifierCall* call = rubric.at(k).call();
    if (!call || labels[k].credit != 0.0) continue;
    std::optional<std::string> tformat;
    if (const Literal* f = call->find("tformat")) tformat = as_string(*f);
    for (const std::string& lit : target_literals(*call)) {
      if (tformat && lit == *tformat) continue;
      if (contains_literal(response, lit)) out.push_back(lit);
    }
  }
  return out;
}

namespace {

constexpr std::string_view kBuilderSystem =
    "You construct evaluation data for reward-model audits. Follow the output format exactly.";
constexpr std::string_view kReviewerSystem =
    "You are an independent reviewer of reward-model audit data. Answer with JSON only.";

std::optional<json> first_json_object(std::string_view text) {
  std::size_t b = text.find('{');
  std::size_t e = text.rfind('}');
  if (b == std::string_view::npos || e == std::string_view::npos || e < b) return std::nullopt;
  json j = json::parse(text.substr(b, e - b + 1), nullptr, false);
  if (j.is_discarded() || !j.is_object()) return std::nullopt;
  return j;
}

struct Candidate {
  std::optional<AuditRecord> record;
  std::string rejection;
};

Candidate build_one(const SourceInstance& src, std::size_t index, GenerationTransport& generator,
                    GenerationTransport& reviewer_a, GenerationTransport& reviewer_b,
                    const BuilderConfig& config, GenerationTransport* genrm) {
  Candidate out;
  const std::string& id = src.task.id;
  auto reject = [&](std::string why) {
    out.rejection = id + ": " + why;
    return out;
  };
  FailureAssignment a = assign_failure(index);
  std::string instruction(prompt_asset(a.instruction_asset));
  std::string checklist = serialize_rubric(src.rubric);

  GenerationRequest gen;
  gen.request_id = id + ":construct";
  gen.system = kBuilderSystem;
  gen.user = render_template(prompt_asset("abnormal_response"),
                             {{"question", src.task.prompt_text},
                              {"original_response", src.task.response},
                              {"checklist", checklist},
                              {"failure_instruction", instruction}});
  std::string reply = generator.generate(gen).text;

  auto response = tagged_section(reply, "response");
  auto extractions_text = tagged_section(reply, "extractions");
  if (!response || response->empty()) return reject("no <response> section");
  if (!extractions_text) return reject("no <extractions> section");
  json extractions = json::parse(*extractions_text, nullptr, false);
  if (extractions.is_discarded() || !extractions.is_object()) {
    return reject("extractions are not a JSON object");
  }

  AuditRecord rec;
  rec.instance_id = id;
  rec.rubric = src.rubric;
  rec.response = *response;
  rec.category = a.category;
  for (std::size_t k = 0; k < src.rubric.size(); ++k) {
    const Criterion& c = src.rubric.at(k);
    auto it = extractions.find(c.description);
    if (it == extractions.end() || !it->is_object()) {
      return reject("no annotation for criterion " + std::to_string(k));
    }
    CriterionLabel label;
    try {
      const json& credit = it->at("credit");
      label.credit = make_credit(credit.get<double>()).value;
    } catch (const std::exception&) {
      return reject("bad credit for criterion " + std::to_string(k));
    }
    if (c.verifiable()) {
      label.extracted = extraction_call(c, *it);
      if (!label.extracted) return reject("bad extracted value for criterion " + std::to_string(k));
    }
    rec.labels.push_back(std::move(label));
  }

  auto leaks = leaked_targets(rec.rubric, rec.labels, rec.response);
  if (!leaks.empty()) return reject("response contains the target '" + leaks.front() + "'");

  ordered_json annotations = ordered_json::array();
  for (const auto& l : rec.labels) annotations.push_back(label_to_json(l));
  for (auto [reviewer, tag] : {std::pair{&reviewer_a, "A"}, std::pair{&reviewer_b, "B"}}) {
    GenerationRequest review;
    review.request_id = id + ":review-" + tag;
    review.system = std::string(kReviewerSystem) + " Reviewer " + tag + ".";
    review.user = render_template(prompt_asset("audit_quality_review"),
                                  {{"question", src.task.prompt_text},
                                   {"checklist", checklist},
                                   {"failure_instruction", instruction},
                                   {"response", rec.response},
                                   {"annotations", annotations.dump()}});
    auto verdict = first_json_object(reviewer->generate(review).text);
    if (!verdict) return reject(std::string("reviewer ") + tag + " reply is not JSON");
    if (!verdict->value("consistent", false) || !verdict->value("matches_failure_mode", false)) {
      return reject(std::string("reviewer ") + tag + " declined: " + verdict->value("reason", ""));
    }
  }

  if (config.fill_genrm_output && genrm) {
    TaskInstance task = src.task;
    task.response = rec.response;
    GenerationRequest req = assemble_scoring_request(task, rec.rubric, config.policy);
    rec.genrm_raw_output = genrm->generate(req).text;
  }
  out.record = std::move(rec);
  return out;
}

}  // namespace

BuildOutcome build_audit_set(const std::vector<SourceInstance>& instances,
                             GenerationTransport& generator, GenerationTransport& reviewer_a,
                             GenerationTransport& reviewer_b, const BuilderConfig& config,
                             GenerationTransport* genrm) {
  config.policy.validate();
  std::function<Candidate(std::size_t)> fn = [&](std::size_t i) {
    return build_one(instances[i], i, generator, reviewer_a, reviewer_b, config, genrm);
  };
  std::vector<Candidate> built = parallel_map<Candidate>(instances.size(), config.parallelism, fn);
  BuildOutcome outcome;
  for (auto& c : built) {
    if (c.record) {
      outcome.accepted.push_back(std::move(*c.record));
    } else {
      outcome.rejected.push_back(std::move(c.rejection));
    }
  }
  return outcome;
}

}  // namespace rubric_reward
