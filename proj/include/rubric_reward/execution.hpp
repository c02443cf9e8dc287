#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "rubric_reward/schema.hpp"
#include "rubric_reward/transport.hpp"
#include "rubric_reward/verifiers.hpp"

namespace rubric_reward {

/// One question/response pair. `image_ref` is carried for bookkeeping and
/// is never read or forwarded by the engine.
struct TaskInstance {
  std::string id;
  std::string prompt_text;
  std::string image_ref;
  std::string response;
  std::int64_t response_length = 0;
};

enum class ScorePath { Verifier, Judge };
std::string_view to_string(ScorePath path);

struct CriterionScore {
  double raw = 0.0;
  ScorePath path = ScorePath::Judge;
  std::string rationale;
  std::optional<VerifierCall> call;  // merged call on the verifier path
  bool mismatched = false;           // lenient-mode slot failure, scored 0
};

enum class ExposureMode { Minimal, Unlimited };
std::string_view to_string(ExposureMode mode);

struct ExposurePolicy {
  ExposureMode mode = ExposureMode::Minimal;
  // Requests are text-only, so the image is never attached. The flag only
  // records the audit configuration and must stay false under Minimal.
  bool judge_sees_image = false;

  void validate() const;
};

enum class Role { Extractor, Judge };

/// Per-criterion request for a single role. Throws RoleMismatch when the
/// criterion's reference does not belong to `role`.
GenerationRequest assemble_context(const TaskInstance& instance, const Criterion& criterion,
                                   Role role, const ExposurePolicy& policy = {});

/// Whole-rubric request: one generation scores every criterion.
GenerationRequest assemble_scoring_request(const TaskInstance& instance, const Rubric& rubric,
                                           const ExposurePolicy& policy = {});

/// Routes one paired record. Verifier path merges the calls and runs the
/// verifier; judge path passes the discrete credit through.
/// Throws PairingError on a path mismatch, MergeConflict, VerifierError.
CriterionScore execute_criterion(const Criterion& criterion, const CriterionRecord& record,
                                 const VerifierConfig& config = {});

enum class PairingMode { Strict, Lenient };

/// One score per criterion, essential then additional.
std::vector<CriterionScore> score_response(const Rubric& rubric, const ScoringOutput& scoring,
                                           PairingMode mode = PairingMode::Lenient,
                                           const VerifierConfig& config = {});

struct ScoringRequestOptions {
  ExposurePolicy policy;
  int retries = 2;
  DecodeParams decode;
  CallStrictness calls = CallStrictness::Strict;
};

struct ScoringResult {
  ScoringOutput output;
  std::string raw;
  int attempts = 0;
};

/// Sends the whole-rubric request and parses the reply, retrying parse
/// failures with the same prompt. Throws TransportError (message carries the
/// instance id) or ParseFailureAfterRetries.
ScoringResult request_scoring(const TaskInstance& instance, const Rubric& rubric,
                              GenerationTransport& transport,
                              const ScoringRequestOptions& options = {});

/// True if `literal` occurs in `text`. Purely alphanumeric literals must sit
/// on word boundaries, so a one-letter option target does not match every
/// capital letter in the prompt.
bool contains_literal(std::string_view text, std::string_view literal);

struct ExposureLeak {
  std::string literal;
  std::size_t offset = 0;
};

/// Scans system, user and schema text for forbidden literals, ignoring
/// matches that lie entirely inside caller-supplied spans of the user text
/// (the question and the response may legitimately contain the answer).
/// `image_ref`, when non-empty, is searched everywhere with no exemption.
std::vector<ExposureLeak> find_exposure_leaks(const GenerationRequest& request,
                                              const std::vector<std::string>& forbidden,
                                              std::string_view image_ref = {});

/// Forbidden literals for a rubric: every target-side argument value.
std::vector<std::string> rubric_target_literals(const Rubric& rubric);

}  // namespace rubric_reward
