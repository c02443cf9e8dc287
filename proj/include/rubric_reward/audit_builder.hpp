#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "rubric_reward/audit.hpp"
#include "rubric_reward/execution.hpp"
#include "rubric_reward/transport.hpp"

namespace rubric_reward {

struct SourceInstance {
  TaskInstance task;
  Rubric rubric;
};

enum class AttackPattern { AuthoritativeCircumlocution, SymbolicBluff, IncorrectSelection };

/// Category and instruction asset for the i-th instance: categories cycle
/// through the four abnormal kinds, adversarial instances cycle through the
/// three attack patterns.
struct FailureAssignment {
  AuditCategory category;
  std::optional<AttackPattern> pattern;
  std::string instruction_asset;
};
FailureAssignment assign_failure(std::size_t index);

struct BuilderConfig {
  std::size_t parallelism = 1;
  /// Also request a GenRM scoring of each accepted response.
  bool fill_genrm_output = false;
  ExposurePolicy policy;
};

struct BuildOutcome {
  std::vector<AuditRecord> accepted;
  std::vector<std::string> rejected;  // "id: reason"
};

/// Converts one annotation value into a predict-side call for `criterion`.
/// Accepts a call string, a plain string, a list of strings, or coordinate
/// arrays. Returns nullopt when the value does not fit the verifier.
std::optional<VerifierCall> extraction_call(const Criterion& criterion,
                                            const nlohmann::json& annotation);

/// Text between <tag> and </tag>, if both are present.
std::optional<std::string> tagged_section(std::string_view text, std::string_view tag);

/// Target strings of verifiable criteria labeled 0 that appear in the
/// response. A constructed failure must not quote the answer it fails.
std::vector<std::string> leaked_targets(const Rubric& rubric,
                                        const std::vector<CriterionLabel>& labels,
                                        std::string_view response);

/// At most one abnormal response per instance. Two reviewer calls must both
/// confirm consistency and the failure mode; leak checks run locally.
BuildOutcome build_audit_set(const std::vector<SourceInstance>& instances,
                             GenerationTransport& generator, GenerationTransport& reviewer_a,
                             GenerationTransport& reviewer_b, const BuilderConfig& config = {},
                             GenerationTransport* genrm = nullptr);

}  // namespace rubric_reward
