#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "rubric_reward/call.hpp"

namespace rubric_reward {

enum class CriterionType { Essential, Additional };

std::string_view to_string(CriterionType t);

struct GroundTruthText {
  std::string text;
  bool operator==(const GroundTruthText&) const = default;
};

using Reference = std::variant<GroundTruthText, VerifierCall>;

struct Criterion {
  std::string description;
  CriterionType ctype = CriterionType::Essential;
  int weight = 1;
  Reference reference;

  bool verifiable() const { return std::holds_alternative<VerifierCall>(reference); }
  const VerifierCall* call() const { return std::get_if<VerifierCall>(&reference); }

  bool operator==(const Criterion&) const = default;
};

struct Rubric {
  std::vector<Criterion> essential;
  std::vector<Criterion> additional;

  std::size_t size() const { return essential.size() + additional.size(); }
  /// Criterion by flat index: essential first, then additional.
  const Criterion& at(std::size_t flat) const;

  bool operator==(const Rubric&) const = default;
};

/// Credit value emitted by a judge: exactly 0, 0.5 or 1.
struct DiscreteCredit {
  double value = 0.0;
  bool operator==(const DiscreteCredit&) const = default;
};

/// Credit string that names a verifier but does not form a valid
/// scoring-side call. Only produced by lenient parsing.
struct MalformedCall {
  std::string text;
  std::string error;
  bool operator==(const MalformedCall&) const = default;
};

using Credit = std::variant<DiscreteCredit, VerifierCall, MalformedCall>;

struct CriterionRecord {
  std::string criterion;
  std::string rationale;
  Credit credit;

  const VerifierCall* call() const { return std::get_if<VerifierCall>(&credit); }
  bool operator==(const CriterionRecord&) const = default;
};

struct ScoringOutput {
  std::string thought;
  std::vector<CriterionRecord> essential;
  std::vector<CriterionRecord> additional;

  std::size_t size() const { return essential.size() + additional.size(); }
  bool operator==(const ScoringOutput&) const = default;
};

enum class CallStrictness {
  Strict,   // bad call strings throw CallParseError
  Lenient,  // bad call strings become MalformedCall
};

Rubric parse_rubric(std::string_view raw);
ScoringOutput parse_scoring(std::string_view raw,
                            CallStrictness calls = CallStrictness::Strict);

/// Accepts 0, 0.5, 1 in integer or decimal form; throws CreditDomainError.
DiscreteCredit make_credit(double value);

std::string serialize_rubric(const Rubric& rubric);
std::string serialize_scoring(const ScoringOutput& scoring);

struct SlotCheck {
  bool present = false;
  bool slot_match = false;
  bool execution_match = false;
  bool call_valid = false;

  bool ok() const { return present && slot_match && execution_match && call_valid; }
};

struct PairingReport {
  // One entry per rubric criterion, essential then additional.
  std::vector<SlotCheck> slots;
  bool lengths_match = false;
  bool all_slots_match = false;
  bool all_execution_match = false;
  bool all_calls_valid = false;

  bool ok() const { return all_slots_match && all_execution_match && all_calls_valid; }
};

PairingReport validate_pairing(const Rubric& rubric, const ScoringOutput& scoring);

/// Record aligned to rubric flat index, or nullptr if the array is short.
const CriterionRecord* record_at(const ScoringOutput& scoring, const Rubric& rubric,
                                 std::size_t flat);

}  // namespace rubric_reward
