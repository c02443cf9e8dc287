#include "rubric_reward/execution.hpp"

#include <algorithm>
#include <cctype>

#include "rubric_reward/error.hpp"
#include "rubric_reward/prompts.hpp"

namespace rubric_reward {

std::string_view to_string(ScorePath path) {
  return path == ScorePath::Verifier ? "verifier" : "judge";
}

std::string_view to_string(ExposureMode mode) {
  return mode == ExposureMode::Minimal ? "minimal" : "unlimited";
}

void ExposurePolicy::validate() const {
  if (mode == ExposureMode::Minimal && judge_sees_image) {
    throw Error(ErrorCode::ArgumentError, "judge_sees_image requires the unlimited exposure mode");
  }
}

namespace {

struct UserTextBuilder {
  std::string text;
  std::vector<std::pair<std::size_t, std::size_t>> spans;

  void heading(std::string_view h) {
    if (!text.empty()) text += "\n\n";
    text += "## ";
    text += h;
    text += "\n";
  }
  void caller(std::string_view s) {
    spans.emplace_back(text.size(), text.size() + s.size());
    text += s;
  }
  void plain(std::string_view s) { text += s; }
};

std::string reference_text(const Criterion& c, const ExposurePolicy& policy) {
  if (const VerifierCall* call = c.call()) {
    if (policy.mode == ExposureMode::Unlimited) return "scoring tool " + to_string(*call);
    return "scoring tool " + scoring_signature(call->name);
  }
  return "ground truth: " + std::get<GroundTruthText>(c.reference).text;
}

void append_item(UserTextBuilder& b, const Criterion& c, std::size_t index,
                 const ExposurePolicy& policy) {
  b.plain("[");
  b.plain(to_string(c.ctype));
  b.plain(" ");
  b.plain(std::to_string(index + 1));
  b.plain("] weight ");
  b.plain(std::to_string(c.weight));
  b.plain("\ncriterion: ");
  b.plain(c.description);
  b.plain("\nreference: ");
  b.plain(reference_text(c, policy));
  b.plain("\n");
}

void append_task(UserTextBuilder& b, const TaskInstance& instance) {
  b.heading("Question");
  b.caller(instance.prompt_text);
  b.heading("Response");
  b.caller(instance.response);
}

std::vector<VerifierName> verifiers_used(const Rubric& rubric) {
  std::vector<VerifierName> out;
  for (std::size_t i = 0; i < rubric.size(); ++i) {
    if (const VerifierCall* call = rubric.at(i).call()) {
      if (std::find(out.begin(), out.end(), call->name) == out.end()) out.push_back(call->name);
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

GenerationRequest finish(const TaskInstance& instance, std::string system, UserTextBuilder b,
                         std::string suffix) {
  GenerationRequest req;
  req.request_id = instance.id + suffix;
  req.system = std::move(system);
  req.user = std::move(b.text);
  req.caller_spans = std::move(b.spans);
  req.response_schema = scoring_output_schema();
  return req;
}

}  // namespace

GenerationRequest assemble_context(const TaskInstance& instance, const Criterion& criterion,
                                   Role role, const ExposurePolicy& policy) {
  policy.validate();
  const VerifierCall* call = criterion.call();
  if (role == Role::Extractor && !call) {
    throw Error(ErrorCode::RoleMismatch,
                "extractor role needs a verifier reference: '" + criterion.description + "'");
  }
  if (role == Role::Judge && call) {
    throw Error(ErrorCode::RoleMismatch,
                "judge role needs a ground-truth reference: '" + criterion.description + "'");
  }
  std::vector<VerifierName> allowed;
  if (call) allowed.push_back(call->name);

  UserTextBuilder b;
  append_task(b, instance);
  b.heading("Checklist");
  append_item(b, criterion, 0, policy);
  return finish(instance, response_scoring_prompt(allowed), std::move(b),
                role == Role::Extractor ? ":extractor" : ":judge");
}

GenerationRequest assemble_scoring_request(const TaskInstance& instance, const Rubric& rubric,
                                           const ExposurePolicy& policy) {
  policy.validate();
  UserTextBuilder b;
  append_task(b, instance);
  b.heading("Checklist");
  for (std::size_t i = 0; i < rubric.essential.size(); ++i) {
    append_item(b, rubric.essential[i], i, policy);
  }
  for (std::size_t i = 0; i < rubric.additional.size(); ++i) {
    append_item(b, rubric.additional[i], i, policy);
  }
  return finish(instance, response_scoring_prompt(verifiers_used(rubric)), std::move(b), "");
}

CriterionScore execute_criterion(const Criterion& criterion, const CriterionRecord& record,
                                 const VerifierConfig& config) {
  CriterionScore out;
  out.rationale = record.rationale;
  if (const VerifierCall* target = criterion.call()) {
    out.path = ScorePath::Verifier;
    const VerifierCall* predict = record.call();
    if (!predict) {
      throw Error(ErrorCode::PairingError,
                  "criterion '" + criterion.description + "' expects a " +
                      std::string(name_of(target->name)) + " call");
    }
    out.call = merge_calls(*target, *predict);
    try {
      out.raw = run_verifier(*out.call, config);
    } catch (const Error& e) {
      if (e.code() == ErrorCode::ArgumentError || e.code() == ErrorCode::FormatError) {
        throw Error(ErrorCode::VerifierError,
                    "criterion '" + criterion.description + "': " + e.message());
      }
      throw;
    }
    return out;
  }
  out.path = ScorePath::Judge;
  const auto* credit = std::get_if<DiscreteCredit>(&record.credit);
  if (!credit) {
    throw Error(ErrorCode::PairingError,
                "criterion '" + criterion.description + "' expects a discrete credit");
  }
  out.raw = credit->value;
  return out;
}

std::vector<CriterionScore> score_response(const Rubric& rubric, const ScoringOutput& scoring,
                                           PairingMode mode, const VerifierConfig& config) {
  PairingReport report = validate_pairing(rubric, scoring);
  if (mode == PairingMode::Strict && !(report.ok() && report.lengths_match)) {
    std::string bad;
    for (std::size_t i = 0; i < report.slots.size(); ++i) {
      if (!report.slots[i].ok()) {
        if (!bad.empty()) bad += ", ";
        bad += std::to_string(i);
      }
    }
    throw Error(ErrorCode::PairingError,
                bad.empty() ? std::string("array lengths differ from the rubric")
                            : "mismatched slots: " + bad);
  }
  std::vector<CriterionScore> out;
  out.reserve(rubric.size());
  for (std::size_t i = 0; i < rubric.size(); ++i) {
    const Criterion& c = rubric.at(i);
    const CriterionRecord* record = record_at(scoring, rubric, i);
    if (!report.slots[i].ok() || !record) {
      CriterionScore s;
      s.path = c.verifiable() ? ScorePath::Verifier : ScorePath::Judge;
      s.mismatched = true;
      if (record) s.rationale = record->rationale;
      out.push_back(std::move(s));
      continue;
    }
    out.push_back(execute_criterion(c, *record, config));
  }
  return out;
}

ScoringResult request_scoring(const TaskInstance& instance, const Rubric& rubric,
                              GenerationTransport& transport,
                              const ScoringRequestOptions& options) {
  if (options.retries < 0) throw Error(ErrorCode::ArgumentError, "retries must be >= 0");
  GenerationRequest req = assemble_scoring_request(instance, rubric, options.policy);
  req.decode = options.decode;
  std::string last_error;
  for (int attempt = 1; attempt <= options.retries + 1; ++attempt) {
    GenerationReply reply;
    try {
      reply = transport.generate(req);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::TransportError) throw;
      throw Error(ErrorCode::TransportError, "instance " + instance.id + ": " + e.message());
    } catch (const std::exception& e) {
      throw Error(ErrorCode::TransportError, "instance " + instance.id + ": " + e.what());
    }
    try {
      ScoringResult result;
      result.output = parse_scoring(reply.text, options.calls);
      result.raw = std::move(reply.text);
      result.attempts = attempt;
      return result;
    } catch (const Error& e) {
      last_error = e.what();
    }
  }
  throw Error(ErrorCode::ParseFailureAfterRetries,
              "instance " + instance.id + ": " + std::to_string(options.retries + 1) +
                  " attempts failed, last: " + last_error);
}

namespace {

bool word_char(unsigned char c) { return std::isalnum(c) || c == '_'; }

std::vector<std::size_t> literal_positions(std::string_view text,
                                                  std::string_view literal) {
  std::vector<std::size_t> out;
  if (literal.empty()) return out;
  bool wordlike = std::all_of(literal.begin(), literal.end(),
                              [](char c) { return word_char(static_cast<unsigned char>(c)); });
  for (std::size_t pos = text.find(literal); pos != std::string_view::npos;
       pos = text.find(literal, pos + 1)) {
    if (wordlike) {
      bool left = pos == 0 || !word_char(static_cast<unsigned char>(text[pos - 1]));
      std::size_t end = pos + literal.size();
      bool right = end == text.size() || !word_char(static_cast<unsigned char>(text[end]));
      if (!left || !right) continue;
    }
    out.push_back(pos);
  }
  return out;
}

}  // namespace

bool contains_literal(std::string_view text, std::string_view literal) {
  return !literal_positions(text, literal).empty();
}

std::vector<ExposureLeak> find_exposure_leaks(const GenerationRequest& request,
                                              const std::vector<std::string>& forbidden,
                                              std::string_view image_ref) {
  const std::string text = request.serialized();
  const std::size_t user_base = request.system.size() + 2;
  auto exempt = [&](std::size_t begin, std::size_t end) {
    for (const auto& [b, e] : request.caller_spans) {
      if (begin >= user_base + b && end <= user_base + e) return true;
    }
    return false;
  };
  std::vector<ExposureLeak> leaks;
  for (const std::string& lit : forbidden) {
    for (std::size_t pos : literal_positions(text, lit)) {
      if (!exempt(pos, pos + lit.size())) leaks.push_back({lit, pos});
    }
  }
  if (!image_ref.empty()) {
    for (std::size_t pos = text.find(image_ref); pos != std::string::npos;
         pos = text.find(image_ref, pos + 1)) {
      leaks.push_back({std::string(image_ref), pos});
    }
  }
  return leaks;
}

std::vector<std::string> rubric_target_literals(const Rubric& rubric) {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < rubric.size(); ++i) {
    if (const VerifierCall* call = rubric.at(i).call()) {
      for (auto& lit : target_literals(*call)) out.push_back(std::move(lit));
    }
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

}  // namespace rubric_reward
