#include "rubric_reward/audit.hpp"

#include <cstdio>

#include <json.hpp>

#include "rubric_reward/error.hpp"
#include "rubric_reward/execution.hpp"

namespace rubric_reward {

namespace {

constexpr std::pair<AuditCategory, std::string_view> kCategoryNames[] = {
    {AuditCategory::Regular, "regular"},
    {AuditCategory::NoFinalAnswer, "no_final_answer"},
    {AuditCategory::Irrelevant, "irrelevant"},
    {AuditCategory::WrongButPlausible, "wrong_but_plausible"},
    {AuditCategory::Adversarial, "adversarial"},
};

void count(Rate& r, bool hit) {
  ++r.total;
  if (hit) ++r.hits;
}

std::optional<ScoringOutput> parse_lenient(std::string_view raw) {
  try {
    return parse_scoring(raw, CallStrictness::Lenient);
  } catch (const Error&) {
    return std::nullopt;
  }
}

/// Engine raw scores as training would compute them: lenient pairing, and
/// all zeros for an unparseable output.
std::vector<double> engine_scores(const AuditRecord& rec, const std::optional<ScoringOutput>& out,
                                  const AuditConfig& config) {
  std::vector<double> scores(rec.rubric.size(), 0.0);
  if (!out) return scores;
  auto scored = score_response(rec.rubric, *out, PairingMode::Lenient, config.content.verifier);
  for (std::size_t k = 0; k < scored.size(); ++k) scores[k] = scored[k].raw;
  return scores;
}

void check_labels(const AuditRecord& rec) {
  if (rec.labels.size() != rec.rubric.size()) {
    throw Error(ErrorCode::ArgumentError, "record " + rec.instance_id + ": " +
                                              std::to_string(rec.labels.size()) + " labels for " +
                                              std::to_string(rec.rubric.size()) + " criteria");
  }
}

void add_fpr(FprCell& cell, const AuditRecord& rec, const AuditConfig& config) {
  check_labels(rec);
  std::vector<double> scores = engine_scores(rec, parse_lenient(rec.genrm_raw_output), config);
  for (std::size_t k = 0; k < rec.rubric.size(); ++k) {
    if (rec.labels[k].credit != 0.0) continue;
    bool fp = scores[k] >= config.fp_threshold;
    count(cell.average, fp);
    count(rec.rubric.at(k).verifiable() ? cell.arguments : cell.credit, fp);
  }
}

nlohmann::ordered_json rate_json(const Rate& r) {
  nlohmann::ordered_json j;
  auto p = r.percent();
  j["percent"] = p ? nlohmann::ordered_json(*p) : nlohmann::ordered_json(nullptr);
  j["hits"] = r.hits;
  j["total"] = r.total;
  return j;
}

std::string pct(const Rate& r) {
  auto p = r.percent();
  if (!p) return "-";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.1f", *p);
  return buf;
}

}  // namespace

std::string_view to_string(AuditCategory c) {
  for (const auto& [k, v] : kCategoryNames) {
    if (k == c) return v;
  }
  return "regular";
}

std::optional<AuditCategory> audit_category_from_name(std::string_view name) {
  for (const auto& [k, v] : kCategoryNames) {
    if (v == name) return k;
  }
  return std::nullopt;
}

bool is_abnormal(AuditCategory c) { return c != AuditCategory::Regular; }

std::optional<double> Rate::percent() const {
  if (total == 0) return std::nullopt;
  return 100.0 * static_cast<double>(hits) / static_cast<double>(total);
}

FprCell false_positive_rate(std::span<const AuditRecord> records, AuditCategory category,
                            const AuditConfig& config) {
  FprCell cell;
  for (const AuditRecord& rec : records) {
    if (rec.category == category) add_fpr(cell, rec, config);
  }
  if (cell.average.total == 0) {
    throw Error(ErrorCode::EmptyCategory,
                "no fail-labeled criteria in category " + std::string(to_string(category)));
  }
  return cell;
}

std::map<AuditCategory, FprCell> false_positive_rates(std::span<const AuditRecord> records,
                                                      const AuditConfig& config) {
  std::map<AuditCategory, FprCell> out;
  for (const AuditRecord& rec : records) {
    if (is_abnormal(rec.category)) add_fpr(out[rec.category], rec, config);
  }
  std::erase_if(out, [](const auto& kv) { return kv.second.average.total == 0; });
  return out;
}

AuditMetrics evaluate_genrm(std::span<const AuditRecord> records, const AuditConfig& config) {
  if (records.empty()) throw Error(ErrorCode::EmptyAuditSet, "no audit records");
  AuditMetrics m;
  m.records = records.size();
  for (const AuditRecord& rec : records) {
    check_labels(rec);
    const Rubric& rubric = rec.rubric;
    std::optional<ScoringOutput> out = parse_lenient(rec.genrm_raw_output);
    count(m.schema, out.has_value());

    std::vector<bool> correct(rubric.size(), false);
    std::vector<bool> routed(rubric.size(), false);
    bool slots_verbatim = false;
    if (out) {
      PairingReport report = validate_pairing(rubric, *out);
      slots_verbatim = report.lengths_match && report.all_slots_match;
      for (std::size_t k = 0; k < rubric.size(); ++k) {
        const SlotCheck& s = report.slots[k];
        routed[k] = s.present && s.execution_match && s.call_valid;
      }
      correct = criterion_correctness(*out, rec.labels, rubric, config.content);
    }
    count(m.criterion, slots_verbatim);

    bool all_routed = true;
    bool all_correct = true;
    for (std::size_t k = 0; k < rubric.size(); ++k) {
      count(m.execution, routed[k]);
      all_routed = all_routed && routed[k];
      count(rubric.at(k).verifiable() ? m.argument : m.credit, correct[k]);
      count(m.criterion_level, correct[k]);
      all_correct = all_correct && correct[k];
    }
    count(m.execution_per_record, all_routed);
    count(m.sample_level, all_correct);
  }
  m.fpr_by_category = false_positive_rates(records, config);
  return m;
}

std::string audit_report_json(const AuditMetrics& m, const AuditConfig& config) {
  nlohmann::ordered_json j;
  j["records"] = m.records;
  j["schema_acc"] = rate_json(m.schema);
  j["criterion_acc"] = rate_json(m.criterion);
  j["execution_acc"] = rate_json(m.execution);
  j["execution_acc_per_record"] = rate_json(m.execution_per_record);
  j["argument_acc"] = rate_json(m.argument);
  j["credit_acc"] = rate_json(m.credit);
  j["criterion_level_acc"] = rate_json(m.criterion_level);
  j["sample_level_acc"] = rate_json(m.sample_level);
  nlohmann::ordered_json fpr = nlohmann::ordered_json::object();
  for (const auto& [cat, cell] : m.fpr_by_category) {
    fpr[std::string(to_string(cat))] = {{"average", rate_json(cell.average)},
                                        {"arguments", rate_json(cell.arguments)},
                                        {"credit", rate_json(cell.credit)}};
  }
  j["fpr_by_category"] = fpr;
  j["settings"] = {{"fp_threshold", config.fp_threshold},
                   {"similarity_pass", config.content.similarity_pass},
                   {"partial_credit_counts_as_fp", config.fp_threshold <= 0.5}};
  return j.dump(2);
}

std::string audit_report_table(const AuditMetrics& m) {
  const char* cols[] = {"Schema", "Criterion", "Execution", "Argument",
                        "Credit", "Criterion-level", "Sample-level"};
  const Rate* rates[] = {&m.schema,   &m.criterion, &m.execution,      &m.argument,
                         &m.credit,   &m.criterion_level, &m.sample_level};
  std::string out;
  char buf[64];
  for (const char* c : cols) {
    std::snprintf(buf, sizeof buf, "%-17s", c);
    out += buf;
  }
  out += "\n";
  for (const Rate* r : rates) {
    std::snprintf(buf, sizeof buf, "%-17s", pct(*r).c_str());
    out += buf;
  }
  out += "\n";
  if (!m.fpr_by_category.empty()) {
    out += "\n";
    std::snprintf(buf, sizeof buf, "%-22s%s\n", "Category", "FPR Average (Arguments / Credit)");
    out += buf;
    for (const auto& [cat, cell] : m.fpr_by_category) {
      std::string cellstr =
          pct(cell.average) + " (" + pct(cell.arguments) + " / " + pct(cell.credit) + ")";
      std::snprintf(buf, sizeof buf, "%-22s", std::string(to_string(cat)).c_str());
      out += buf;
      out += cellstr;
      out += "\n";
    }
  }
  return out;
}

}  // namespace rubric_reward
