#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "rubric_reward/schema.hpp"
#include "rubric_reward/verifiers.hpp"

namespace rubric_reward {

struct TeacherScoring {
  std::string teacher_id;
  ScoringOutput scoring;
};

/// Reference label for one criterion. `extracted` holds the predict-side
/// call of the chosen teacher (predict, plus pformat for time) and is set
/// exactly for verifiable criteria.
struct CriterionLabel {
  double credit = 0.0;
  std::optional<VerifierCall> extracted;
  bool operator==(const CriterionLabel&) const = default;
};

/// Maps a verifier score onto {0, 0.5, 1}: below 0.5, below 1, exactly 1.
double discretize_score(double score);

/// Lower median of a non-empty credit multiset.
double lower_median(std::vector<double> credits);

struct LabelDiagnostics {
  // "teacher_id: criterion index: reason" for every excluded slot.
  std::vector<std::string> excluded;
};

/// Per criterion: each teacher's effective credit (judge credit, or the
/// discretized verifier score of its extraction), the lower median of those
/// credits, and for verifiable criteria the extraction of the first teacher
/// whose effective credit equals the median. Slots that fail pairing are
/// left out of the median. Throws NoMatchingTeacher if a criterion has no
/// usable teacher.
std::vector<CriterionLabel> aggregate_teacher_labels(std::span<const TeacherScoring> teachers,
                                                     const Rubric& rubric,
                                                     const VerifierConfig& config = {},
                                                     LabelDiagnostics* diagnostics = nullptr);

/// 1 iff `raw` parses strictly and every slot pairs with the rubric.
int format_reward(std::string_view raw, const Rubric& rubric);

struct ContentRewardConfig {
  /// Pass bar for similarity-valued verifiers; binary ones need exactly 1.
  double similarity_pass = 0.95;
  VerifierConfig verifier;
};

/// Student extraction scored against the label extraction with the
/// criterion's verifier and flags. When the label value cannot serve as a
/// target (empty box list, unparseable time), the two extractions must be
/// literally equal.
double extraction_agreement(const Criterion& criterion, const VerifierCall& label,
                            const VerifierCall& student, const VerifierConfig& config = {});

/// Per-criterion correctness of one validated scoring output.
std::vector<bool> criterion_correctness(const ScoringOutput& scoring,
                                        std::span<const CriterionLabel> labels,
                                        const Rubric& rubric,
                                        const ContentRewardConfig& config = {});

/// Mean per-criterion correctness; 0 when the output does not pair.
double content_reward(const ScoringOutput& scoring, std::span<const CriterionLabel> labels,
                      const Rubric& rubric, const ContentRewardConfig& config = {});

struct GenrmReward {
  int format = 0;
  double content = 0.0;
  double total() const { return format * content; }
};

GenrmReward genrm_reward(std::string_view raw, std::span<const CriterionLabel> labels,
                         const Rubric& rubric, const ContentRewardConfig& config = {});

}  // namespace rubric_reward
