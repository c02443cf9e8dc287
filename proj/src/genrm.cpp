#include "rubric_reward/genrm.hpp"

#include <algorithm>

#include "rubric_reward/error.hpp"

namespace rubric_reward {

double discretize_score(double score) {
  if (score < 0.5) return 0.0;
  if (score < 1.0) return 0.5;
  return 1.0;
}

double lower_median(std::vector<double> credits) {
  if (credits.empty()) throw Error(ErrorCode::NoMatchingTeacher, "no credits to aggregate");
  std::sort(credits.begin(), credits.end());
  return credits[(credits.size() - 1) / 2];
}

namespace {

struct TeacherCredit {
  double credit;
  const VerifierCall* extracted;
};

bool empty_literal(const Literal& lit) {
  if (std::holds_alternative<EmptyList>(lit)) return true;
  if (const auto* s = std::get_if<std::string>(&lit)) return s->empty();
  return std::visit(
      [](const auto& v) {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, StringList> || std::is_same_v<T, IntList> ||
                      std::is_same_v<T, IntMatrix> || std::is_same_v<T, StringMatrix>) {
          return v.empty();
        } else {
          return false;
        }
      },
      lit);
}

bool same_literal(const Literal* a, const Literal* b) {
  if (!a || !b) return a == b;
  if (empty_literal(*a) && empty_literal(*b)) return true;
  return *a == *b;
}

}  // namespace

std::vector<CriterionLabel> aggregate_teacher_labels(std::span<const TeacherScoring> teachers,
                                                     const Rubric& rubric,
                                                     const VerifierConfig& config,
                                                     LabelDiagnostics* diagnostics) {
  if (teachers.empty()) throw Error(ErrorCode::NoMatchingTeacher, "no teacher scorings given");
  std::vector<PairingReport> reports;
  reports.reserve(teachers.size());
  for (const TeacherScoring& t : teachers) reports.push_back(validate_pairing(rubric, t.scoring));

  auto exclude = [&](const TeacherScoring& t, std::size_t k, const std::string& why) {
    if (diagnostics) {
      diagnostics->excluded.push_back(t.teacher_id + ": " + std::to_string(k) + ": " + why);
    }
  };

  std::vector<CriterionLabel> labels;
  labels.reserve(rubric.size());
  for (std::size_t k = 0; k < rubric.size(); ++k) {
    const Criterion& c = rubric.at(k);
    std::vector<TeacherCredit> credits;
    for (std::size_t t = 0; t < teachers.size(); ++t) {
      const CriterionRecord* record = record_at(teachers[t].scoring, rubric, k);
      if (!record || !reports[t].slots[k].ok()) {
        exclude(teachers[t], k, "slot fails pairing");
        continue;
      }
      if (const VerifierCall* target = c.call()) {
        const VerifierCall* predict = record->call();
        double score = run_verifier(merge_calls(*target, *predict), config);
        credits.push_back({discretize_score(score), predict});
      } else {
        credits.push_back({std::get<DiscreteCredit>(record->credit).value, nullptr});
      }
    }
    if (credits.empty()) {
      throw Error(ErrorCode::NoMatchingTeacher,
                  "no teacher supplies a valid record for criterion '" + c.description + "'");
    }
    std::vector<double> values;
    for (const auto& tc : credits) values.push_back(tc.credit);
    CriterionLabel label;
    label.credit = lower_median(values);
    if (c.verifiable()) {
      auto it = std::find_if(credits.begin(), credits.end(),
                             [&](const TeacherCredit& tc) { return tc.credit == label.credit; });
      if (it == credits.end()) {
        throw Error(ErrorCode::NoMatchingTeacher,
                    "no teacher credit equals the median for '" + c.description + "'");
      }
      label.extracted = *it->extracted;
    }
    labels.push_back(std::move(label));
  }
  return labels;
}

int format_reward(std::string_view raw, const Rubric& rubric) {
  try {
    ScoringOutput out = parse_scoring(raw, CallStrictness::Strict);
    PairingReport report = validate_pairing(rubric, out);
    return report.lengths_match && report.ok() ? 1 : 0;
  } catch (const Error&) {
    return 0;
  }
}

double extraction_agreement(const Criterion& criterion, const VerifierCall& label,
                            const VerifierCall& student, const VerifierConfig& config) {
  const VerifierCall* rubric_call = criterion.call();
  if (!rubric_call) {
    throw Error(ErrorCode::ArgumentError,
                "criterion '" + criterion.description + "' is not verifiable");
  }
  if (label.name != rubric_call->name || student.name != rubric_call->name) return 0.0;

  // The label's extraction takes the place of the rubric target; option
  // flags (case, spacing, ...) stay as the rubric set them.
  VerifierCall merged;
  merged.name = rubric_call->name;
  for (const auto& [key, value] : rubric_call->args) {
    if (key == "target" || key == "candidates" || key == "tformat") continue;
    merged.args.emplace_back(key, value);
  }
  if (const Literal* p = label.find("predict")) merged.args.emplace_back("target", *p);
  if (const Literal* f = label.find("pformat")) merged.args.emplace_back("tformat", *f);
  for (const auto& [key, value] : student.args) merged.args.emplace_back(key, value);

  try {
    return run_verifier(merged, config);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::ArgumentError && e.code() != ErrorCode::FormatError) throw;
  }
  bool equal = same_literal(label.find("predict"), student.find("predict")) &&
               same_literal(label.find("pformat"), student.find("pformat"));
  return equal ? 1.0 : 0.0;
}

std::vector<bool> criterion_correctness(const ScoringOutput& scoring,
                                        std::span<const CriterionLabel> labels,
                                        const Rubric& rubric,
                                        const ContentRewardConfig& config) {
  if (labels.size() != rubric.size()) {
    throw Error(ErrorCode::ArgumentError, "label count differs from the rubric size");
  }
  PairingReport report = validate_pairing(rubric, scoring);
  std::vector<bool> out(rubric.size(), false);
  for (std::size_t k = 0; k < rubric.size(); ++k) {
    const CriterionRecord* record = record_at(scoring, rubric, k);
    if (!record || !report.slots[k].ok()) continue;
    const Criterion& c = rubric.at(k);
    const CriterionLabel& label = labels[k];
    if (const VerifierCall* call = c.call()) {
      if (!label.extracted) {
        throw Error(ErrorCode::ArgumentError,
                    "label for verifiable criterion '" + c.description + "' has no extraction");
      }
      double s = extraction_agreement(c, *label.extracted, *record->call(), config.verifier);
      out[k] = is_binary_verifier(call->name) ? s >= 1.0 : s >= config.similarity_pass;
    } else {
      out[k] = std::get<DiscreteCredit>(record->credit).value == label.credit;
    }
  }
  return out;
}

double content_reward(const ScoringOutput& scoring, std::span<const CriterionLabel> labels,
                      const Rubric& rubric, const ContentRewardConfig& config) {
  PairingReport report = validate_pairing(rubric, scoring);
  if (!report.lengths_match || !report.ok()) return 0.0;
  std::vector<bool> correct = criterion_correctness(scoring, labels, rubric, config);
  if (correct.empty()) return 0.0;
  auto hits = std::count(correct.begin(), correct.end(), true);
  return static_cast<double>(hits) / static_cast<double>(correct.size());
}

GenrmReward genrm_reward(std::string_view raw, std::span<const CriterionLabel> labels,
                         const Rubric& rubric, const ContentRewardConfig& config) {
  GenrmReward r;
  r.format = format_reward(raw, rubric);
  if (r.format == 1) r.content = content_reward(parse_scoring(raw), labels, rubric, config);
  return r;
}

}  // namespace rubric_reward
