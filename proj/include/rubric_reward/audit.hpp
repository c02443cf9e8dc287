#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "rubric_reward/genrm.hpp"
#include "rubric_reward/schema.hpp"

namespace rubric_reward {

enum class AuditCategory { Regular, NoFinalAnswer, Irrelevant, WrongButPlausible, Adversarial };

std::string_view to_string(AuditCategory c);
std::optional<AuditCategory> audit_category_from_name(std::string_view name);
bool is_abnormal(AuditCategory c);

struct AuditRecord {
  std::string instance_id;
  Rubric rubric;
  std::string response;
  AuditCategory category = AuditCategory::Regular;
  std::vector<CriterionLabel> labels;
  std::string genrm_raw_output;
};

/// Hit count over a denominator; `percent()` is empty when nothing was
/// counted.
struct Rate {
  std::size_t hits = 0;
  std::size_t total = 0;
  std::optional<double> percent() const;
};

struct FprCell {
  Rate average;    // all fail-labeled criteria (micro-average)
  Rate arguments;  // fail-labeled verifiable criteria
  Rate credit;     // fail-labeled judge criteria
};

struct AuditMetrics {
  std::size_t records = 0;
  Rate schema;
  Rate criterion;
  Rate execution;             // per criterion (headline)
  Rate execution_per_record;  // records whose every slot routes correctly
  Rate argument;
  Rate credit;
  Rate criterion_level;
  Rate sample_level;
  std::map<AuditCategory, FprCell> fpr_by_category;
};

struct AuditConfig {
  ContentRewardConfig content;
  /// Engine scores at or above this count as credit on a fail-labeled item.
  double fp_threshold = 0.5;
};

/// Accuracies over all records plus false-positive rates for
/// every abnormal category that has fail-labeled criteria.
/// Throws EmptyAuditSet.
AuditMetrics evaluate_genrm(std::span<const AuditRecord> records, const AuditConfig& config = {});

/// False-positive counts for one category. Throws EmptyCategory when the
/// category has no fail-labeled criteria among `records`.
FprCell false_positive_rate(std::span<const AuditRecord> records, AuditCategory category,
                            const AuditConfig& config = {});

/// Cells for every abnormal category with at least one fail-labeled criterion.
std::map<AuditCategory, FprCell> false_positive_rates(std::span<const AuditRecord> records,
                                                      const AuditConfig& config = {});

std::string audit_report_json(const AuditMetrics& metrics, const AuditConfig& config = {});
std::string audit_report_table(const AuditMetrics& metrics);

}  // namespace rubric_reward
