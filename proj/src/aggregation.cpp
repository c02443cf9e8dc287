#include "rubric_reward/aggregation.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "rubric_reward/error.hpp"

namespace rubric_reward {

std::vector<CriterionMeta> criterion_meta(const Rubric& rubric) {
  std::vector<CriterionMeta> out;
  out.reserve(rubric.size());
  for (std::size_t i = 0; i < rubric.size(); ++i) {
    const Criterion& c = rubric.at(i);
    out.push_back({c.ctype, c.weight});
  }
  return out;
}

void GroupScores::validate() const {
  if (!(tau > 0.0 && tau < 1.0)) throw Error(ErrorCode::ArgumentError, "tau must lie in (0, 1)");
  if (scores.empty() || scores.front().empty()) {
    throw Error(ErrorCode::ArgumentError, "group needs at least one criterion and one rollout");
  }
  if (criteria.size() != scores.size()) {
    throw Error(ErrorCode::ArgumentError, "criterion metadata does not match the score rows");
  }
  for (const auto& row : scores) {
    if (row.size() != scores.front().size()) {
      throw Error(ErrorCode::ArgumentError, "ragged score matrix");
    }
    for (double s : row) {
      if (!(s >= 0.0 && s <= 1.0)) throw Error(ErrorCode::ArgumentError, "score outside [0, 1]");
    }
  }
}

std::vector<double> remap_row(std::span<const double> row, double tau) {
  std::vector<double> out(row.size());
  if (row.empty()) return out;
  auto [lo_it, hi_it] = std::minmax_element(row.begin(), row.end());
  const double lo = *lo_it;
  const double hi = *hi_it;
  const double lower = lo < tau ? 0.0 : 0.5;
  const double upper = hi > tau ? 1.0 : 0.5;
  if (lo == hi) {
    std::fill(out.begin(), out.end(), lo > tau ? upper : lower);
    return out;
  }
  const double span = hi - lo;
  for (std::size_t i = 0; i < row.size(); ++i) {
    if (row[i] == lo) {
      out[i] = lower;
    } else if (row[i] == hi) {
      out[i] = upper;
    } else {
      out[i] = lower + (row[i] - lo) / span * (upper - lower);
    }
  }
  return out;
}

Matrix remap_group(const GroupScores& group) {
  group.validate();
  Matrix out;
  out.reserve(group.scores.size());
  for (const auto& row : group.scores) out.push_back(remap_row(row, group.tau));
  return out;
}

int content_mask(std::span<const double> essential_remapped) {
  int partial = 0;
  for (double s : essential_remapped) {
    if (s < 0.5) return 0;
    if (s < 1.0) ++partial;
  }
  return partial >= 2 ? 0 : 1;
}

double base_reward(std::span<const CriterionMeta> criteria, std::span<const double> remapped) {
  if (criteria.size() != remapped.size()) {
    throw Error(ErrorCode::ArgumentError, "remapped column does not match the rubric");
  }
  double num = 0.0;
  double den = 0.0;
  for (std::size_t k = 0; k < criteria.size(); ++k) {
    num += criteria[k].weight * remapped[k];
    den += criteria[k].weight;
  }
  return den > 0.0 ? num / den : 0.0;
}

double final_reward(std::span<const CriterionMeta> criteria, std::span<const double> remapped,
                    int format_mask_value) {
  std::vector<double> essential;
  for (std::size_t k = 0; k < criteria.size() && k < remapped.size(); ++k) {
    if (criteria[k].ctype == CriterionType::Essential) essential.push_back(remapped[k]);
  }
  double base = base_reward(criteria, remapped);
  return content_mask(essential) * format_mask_value * base;
}

double length_gate(double reward, std::int64_t response_length, std::int64_t max_length) {
  if (max_length <= 0) throw Error(ErrorCode::ArgumentError, "max_length must be positive");
  return response_length > max_length ? 0.0 : reward;
}

std::vector<double> group_advantages(std::span<const double> rewards) {
  const std::size_t g = rewards.size();
  if (g < 2) {
    throw Error(ErrorCode::GroupTooSmall,
                "group of " + std::to_string(g) + " rollouts; at least 2 required");
  }
  const double mean = std::accumulate(rewards.begin(), rewards.end(), 0.0) / g;
  double ss = 0.0;
  for (double r : rewards) ss += (r - mean) * (r - mean);
  const double std_dev = std::sqrt(ss / g);
  std::vector<double> out(g, 0.0);
  if (std_dev == 0.0) return out;
  for (std::size_t i = 0; i < g; ++i) out[i] = (rewards[i] - mean) / (std_dev + kAdvantageEpsilon);
  return out;
}

std::vector<RewardBreakdown> aggregate_group(std::span<const CriterionMeta> criteria,
                                             const std::vector<Rollout>& rollouts,
                                             const AggregationConfig& config) {
  const std::size_t g = rollouts.size();
  if (g < 2) {
    throw Error(ErrorCode::GroupTooSmall,
                "group of " + std::to_string(g) + " rollouts; at least 2 required");
  }
  GroupScores group;
  group.tau = config.tau;
  group.criteria.assign(criteria.begin(), criteria.end());
  group.scores.assign(criteria.size(), std::vector<double>(g));
  for (std::size_t i = 0; i < g; ++i) {
    if (rollouts[i].raw.size() != criteria.size()) {
      throw Error(ErrorCode::ArgumentError, "rollout " + std::to_string(i) + " has " +
                                                std::to_string(rollouts[i].raw.size()) +
                                                " scores for " + std::to_string(criteria.size()) +
                                                " criteria");
    }
    for (std::size_t k = 0; k < criteria.size(); ++k) group.scores[k][i] = rollouts[i].raw[k];
  }
  Matrix remapped = remap_group(group);

  std::vector<RewardBreakdown> out(g);
  std::vector<double> finals(g);
  for (std::size_t i = 0; i < g; ++i) {
    RewardBreakdown& b = out[i];
    b.raw = rollouts[i].raw;
    b.remapped.resize(criteria.size());
    std::vector<double> essential;
    for (std::size_t k = 0; k < criteria.size(); ++k) {
      b.remapped[k] = remapped[k][i];
      if (criteria[k].ctype == CriterionType::Essential) essential.push_back(b.remapped[k]);
    }
    b.base = base_reward(criteria, b.remapped);
    b.content_mask = content_mask(essential);
    b.format_mask = config.format_rules_enabled ? format_mask(rollouts[i].response, config.format)
                                                : 1;
    b.final = b.content_mask * b.format_mask * b.base;
    if (config.max_length) {
      b.length_exceeded = rollouts[i].response_length > *config.max_length;
      b.final = length_gate(b.final, rollouts[i].response_length, *config.max_length);
    }
    finals[i] = b.final;
  }
  std::vector<double> adv = group_advantages(finals);
  for (std::size_t i = 0; i < g; ++i) out[i].advantage = adv[i];
  return out;
}

std::vector<RewardBreakdown> score_group(const Rubric& rubric,
                                         const std::vector<ScoredRollout>& rollouts,
                                         const AggregationConfig& config, PairingMode mode,
                                         const VerifierConfig& verifier) {
  std::vector<Rollout> raw;
  raw.reserve(rollouts.size());
  for (const ScoredRollout& r : rollouts) {
    Rollout out;
    for (const CriterionScore& s : score_response(rubric, r.scoring, mode, verifier)) {
      out.raw.push_back(s.raw);
    }
    out.response = r.response;
    out.response_length = r.response_length;
    raw.push_back(std::move(out));
  }
  std::vector<CriterionMeta> meta = criterion_meta(rubric);
  return aggregate_group(meta, raw, config);
}

std::string_view to_string(FilterMode mode) {
  return mode == FilterMode::Any ? "any" : "essential";
}

std::vector<std::string> filter_instances(const std::vector<InstanceScores>& instances,
                                          FilterMode mode) {
  std::vector<std::string> kept;
  for (const InstanceScores& inst : instances) {
    bool keep = false;
    for (const auto& rollout : inst.rollouts) {
      if (rollout.size() != inst.types.size()) {
        throw Error(ErrorCode::ArgumentError,
                    "instance " + inst.id + ": rollout width differs from criterion count");
      }
      for (std::size_t k = 0; k < rollout.size() && !keep; ++k) {
        if (rollout[k] != 0.0) continue;
        keep = mode == FilterMode::Any || inst.types[k] == CriterionType::Essential;
      }
      if (keep) break;
    }
    if (keep) kept.push_back(inst.id);
  }
  return kept;
}

}  // namespace rubric_reward
