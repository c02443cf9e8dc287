#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "rubric_reward/execution.hpp"
#include "rubric_reward/format_rules.hpp"
#include "rubric_reward/schema.hpp"

namespace rubric_reward {

using Matrix = std::vector<std::vector<double>>;

struct CriterionMeta {
  CriterionType ctype = CriterionType::Essential;
  int weight = 1;
};

std::vector<CriterionMeta> criterion_meta(const Rubric& rubric);

/// Raw scores of one rollout group: scores[k][i] for criterion k, rollout i.
struct GroupScores {
  Matrix scores;
  std::vector<CriterionMeta> criteria;
  double tau = 0.5;

  std::size_t criteria_count() const { return scores.size(); }
  std::size_t group_size() const { return scores.empty() ? 0 : scores.front().size(); }

  /// Throws ArgumentError on an empty or ragged matrix, entries outside
  /// [0, 1], metadata of the wrong length, or tau outside (0, 1).
  void validate() const;
};

/// Remaps one criterion row onto [lower, upper], where lower is 0 if some
/// score falls below tau (else 0.5) and upper is 1 if some score exceeds tau
/// (else 0.5). A constant row goes to upper when it exceeds tau, else lower.
std::vector<double> remap_row(std::span<const double> row, double tau);
Matrix remap_group(const GroupScores& group);

/// 0 if any remapped essential score is below 0.5 or at least two lie in
/// [0.5, 1); else 1.
int content_mask(std::span<const double> essential_remapped);

/// Weighted mean of the remapped column, normalized by the weight sum.
double base_reward(std::span<const CriterionMeta> criteria, std::span<const double> remapped);

double final_reward(std::span<const CriterionMeta> criteria, std::span<const double> remapped,
                    int format_mask_value);

/// 0 when the response is longer than max_length; the limit itself passes.
double length_gate(double reward, std::int64_t response_length, std::int64_t max_length);

/// (r - mean) / (population std + 1e-8); all zeros for a constant group.
/// Throws GroupTooSmall for fewer than two rewards.
std::vector<double> group_advantages(std::span<const double> rewards);

inline constexpr double kAdvantageEpsilon = 1e-8;

struct RewardBreakdown {
  std::vector<double> raw;
  std::vector<double> remapped;
  double base = 0.0;
  int content_mask = 1;
  int format_mask = 1;
  bool length_exceeded = false;
  double final = 0.0;  // after masks and the length gate
  double advantage = 0.0;
};

struct Rollout {
  std::vector<double> raw;  // one raw score per criterion, rubric order
  std::string response;
  std::int64_t response_length = 0;
};

struct AggregationConfig {
  double tau = 0.5;
  std::optional<std::int64_t> max_length;
  bool format_rules_enabled = true;
  FormatRuleSet format;
};

/// Full group step: remap, masks, base and final rewards, length gate, then
/// advantages over the gated rewards. Throws GroupTooSmall for G < 2.
std::vector<RewardBreakdown> aggregate_group(std::span<const CriterionMeta> criteria,
                                             const std::vector<Rollout>& rollouts,
                                             const AggregationConfig& config = {});

/// Scores every rollout with score_response and aggregates the group.
struct ScoredRollout {
  ScoringOutput scoring;
  std::string response;
  std::int64_t response_length = 0;
};
std::vector<RewardBreakdown> score_group(const Rubric& rubric,
                                         const std::vector<ScoredRollout>& rollouts,
                                         const AggregationConfig& config = {},
                                         PairingMode mode = PairingMode::Lenient,
                                         const VerifierConfig& verifier = {});

enum class FilterMode { Any, Essential };
std::string_view to_string(FilterMode mode);

struct InstanceScores {
  std::string id;
  std::vector<CriterionType> types;  // one per criterion
  Matrix rollouts;                   // rollouts[i][k], raw scores
};

/// Ids of instances with at least one rollout scoring exactly 0 on some
/// criterion (Any) or on some essential criterion (Essential), input order.
std::vector<std::string> filter_instances(const std::vector<InstanceScores>& instances,
                                          FilterMode mode);

}  // namespace rubric_reward
