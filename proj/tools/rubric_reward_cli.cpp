// Command-line front end: verify, score, aggregate, filter, audit and
// build-audit-set over record-per-line JSON files.
//
// Exit codes: 0 success, 1 I/O or transport failure, 2 parse error,
// 3 semantic mismatch.

#include <CLI11.hpp>
#include <cstdio>
#include <iostream>
#include <memory>
#include <numeric>

#include "rubric_reward/aggregation.hpp"
#include "rubric_reward/audit.hpp"
#include "rubric_reward/audit_builder.hpp"
#include "rubric_reward/batch.hpp"
#include "rubric_reward/error.hpp"
#include "rubric_reward/execution.hpp"
#include "rubric_reward/verifiers.hpp"

namespace rr = rubric_reward;
using nlohmann::json;

namespace {

int exit_code_for(rr::ErrorCode code) {
  switch (code) {
    case rr::ErrorCode::IoError:
    case rr::ErrorCode::TransportError:
      return 1;
    case rr::ErrorCode::MalformedDocument:
    case rr::ErrorCode::SchemaViolation:
    case rr::ErrorCode::CallParseError:
    case rr::ErrorCode::CreditDomainError:
    case rr::ErrorCode::ParseFailureAfterRetries:
      return 2;
    default:
      return 3;
  }
}

struct Options {
  std::string input;
  std::string output = "-";
  double tau = 0.5;
  std::string mode = "any";
  std::string exposure = "minimal";
  bool strict = false;
  std::int64_t max_length = 0;
  std::size_t group_size = 0;
  std::size_t parallelism = 1;
  std::string transport;
  std::string replay_file;
  std::string reviewer_replay_file;
  double point_scale = 141.42;
  int retries = 2;
  bool no_format_rules = false;
  double fp_threshold = 0.5;
  double similarity_pass = 0.95;
  std::string table;
  bool fill_genrm = false;
};

rr::ExposurePolicy policy_from(const Options& o) {
  rr::ExposurePolicy p;
  p.mode = o.exposure == "unlimited" ? rr::ExposureMode::Unlimited : rr::ExposureMode::Minimal;
  return p;
}

rr::VerifierConfig verifier_from(const Options& o) {
  rr::VerifierConfig c;
  c.point_scale = o.point_scale;
  return c;
}

std::unique_ptr<rr::GenerationTransport> make_transport(const Options& o, const std::string& file) {
  if (o.transport == "replay") {
    if (file.empty()) {
      throw rr::Error(rr::ErrorCode::ArgumentError, "--transport replay needs --replay-file");
    }
    return std::make_unique<rr::ReplayTransport>(rr::ReplayTransport::from_file(file));
  }
  if (o.transport == "http") {
    return std::make_unique<rr::HttpTransport>(rr::HttpTransportConfig::from_env());
  }
  return nullptr;
}

/// Per-record outcome: an output line or an error that lenient mode logs.
struct RecordResult {
  std::string line;
  std::optional<rr::Error> error;
  double value = 0.0;  // command-specific summary contribution
  bool flag = false;
};

/// Runs `fn` over every input line with the worker pool. Lenient mode turns
/// record errors into {"id", "error"} lines; strict mode stops at the first.
int run_batch(const Options& o, const std::string& command,
              const std::function<RecordResult(const rr::InputLine&, const json&)>& fn,
              const std::function<void(const std::vector<RecordResult>&)>& summarize) {
  std::vector<rr::InputLine> lines = rr::read_lines(o.input);
  std::function<RecordResult(std::size_t)> task = [&](std::size_t i) {
    RecordResult r;
    json j;
    try {
      j = rr::parse_line(lines[i]);
      r = fn(lines[i], j);
    } catch (const rr::Error& e) {
      r.error = e;
    } catch (const json::exception& e) {
      r.error = rr::Error(rr::ErrorCode::SchemaViolation, e.what());
    }
    if (r.error) {
      json err = {{"line", lines[i].lineno}, {"error", r.error->what()}};
      if (j.is_object() && j.contains("id")) err["id"] = j["id"];
      r.line = err.dump();
    }
    return r;
  };
  std::vector<RecordResult> results = rr::parallel_map<RecordResult>(lines.size(), o.parallelism, task);
  std::vector<std::string> out;
  std::size_t errors = 0;
  for (const auto& r : results) {
    if (r.error) {
      ++errors;
      std::cerr << command << ": line error: " << r.error->what() << "\n";
      if (o.strict) return exit_code_for(r.error->code());
    }
    if (!r.line.empty()) out.push_back(r.line);
  }
  rr::write_lines(o.output, out);
  summarize(results);
  std::cerr << command << ": " << lines.size() << " records, " << errors << " errors\n";
  return 0;
}

double mean_of(const std::vector<double>& v) {
  return v.empty() ? 0.0 : std::accumulate(v.begin(), v.end(), 0.0) / v.size();
}

int cmd_verify(const std::string& target_text, const std::string& predict_text,
               const Options& o) {
  rr::VerifierCall target, predict;
  try {
    target = rr::parse_call(target_text);
    predict = rr::parse_call(predict_text);
    rr::check_call_side(target, rr::CallSide::Target);
    rr::check_call_side(predict, rr::CallSide::Predict);
  } catch (const rr::Error& e) {
    std::cerr << "verify: " << e.what() << "\n";
    return 2;
  }
  if (target.name != predict.name) {
    std::cerr << "verify: verifier names differ (" << rr::name_of(target.name) << " vs "
              << rr::name_of(predict.name) << ")\n";
    return 3;
  }
  try {
    double score = rr::run_verifier(rr::merge_calls(target, predict), verifier_from(o));
    std::printf("%.4f\n", score);
    return 0;
  } catch (const rr::Error& e) {
    std::cerr << "verify: " << e.what() << "\n";
    return exit_code_for(e.code());
  }
}

int cmd_score(const Options& o) {
  auto transport = make_transport(o, o.replay_file);
  rr::ScoringRequestOptions req;
  req.policy = policy_from(o);
  req.retries = o.retries;
  const auto mode = o.strict ? rr::PairingMode::Strict : rr::PairingMode::Lenient;
  const rr::VerifierConfig vc = verifier_from(o);
  return run_batch(
      o, "score",
      [&](const rr::InputLine&, const json& j) {
        rr::Rubric rubric = rr::rubric_field(j, "rubric");
        rr::TaskInstance task = rr::task_from_json(j);
        rr::ScoringOutput scoring;
        if (j.contains("scoring")) {
          const json& s = j["scoring"];
          scoring = rr::parse_scoring(s.is_string() ? s.get<std::string>() : s.dump(),
                                      o.strict ? rr::CallStrictness::Strict
                                               : rr::CallStrictness::Lenient);
        } else if (transport) {
          scoring = rr::request_scoring(task, rubric, *transport, req).output;
        } else {
          throw rr::Error(rr::ErrorCode::SchemaViolation,
                          "record has no 'scoring' and no --transport was given");
        }
        auto scores = rr::score_response(rubric, scoring, mode, vc);
        rr::ordered_json out;
        out["id"] = task.id;
        rr::ordered_json arr = rr::ordered_json::array();
        double sum = 0.0;
        for (const auto& s : scores) {
          arr.push_back(rr::criterion_score_to_json(s));
          sum += s.raw;
        }
        out["scores"] = arr;
        RecordResult r;
        r.line = out.dump();
        r.value = scores.empty() ? 0.0 : sum / scores.size();
        return r;
      },
      [](const std::vector<RecordResult>& rs) {
        std::vector<double> v;
        for (const auto& r : rs)
          if (!r.error) v.push_back(r.value);
        std::fprintf(stderr, "score: mean raw criterion score %.4f\n", mean_of(v));
      });
}

std::vector<rr::CriterionMeta> meta_from(const json& j) {
  if (j.contains("rubric")) return rr::criterion_meta(rr::rubric_field(j, "rubric"));
  std::vector<rr::CriterionMeta> meta;
  const json& types = j.at("types");
  std::vector<int> weights;
  if (j.contains("weights")) weights = j["weights"].get<std::vector<int>>();
  for (std::size_t k = 0; k < types.size(); ++k) {
    std::string t = types[k].get<std::string>();
    if (t != "essential" && t != "additional") {
      throw rr::Error(rr::ErrorCode::SchemaViolation, "criterion type must be essential or additional");
    }
    meta.push_back({t == "essential" ? rr::CriterionType::Essential : rr::CriterionType::Additional,
                    k < weights.size() ? weights[k] : 1});
  }
  return meta;
}

/// Raw scores for each rollout: a "raw" array, or a scoring output scored
/// against the rubric.
std::vector<rr::Rollout> rollouts_from(const json& j, const Options& o) {
  std::optional<rr::Rubric> rubric;
  if (j.contains("rubric")) rubric = rr::rubric_field(j, "rubric");
  const auto mode = o.strict ? rr::PairingMode::Strict : rr::PairingMode::Lenient;
  std::vector<rr::Rollout> out;
  const json& rollouts = j.at("rollouts");
  for (const json& r : rollouts) {
    rr::Rollout ro;
    ro.response = r.value("response", "");
    ro.response_length = r.value("response_length", static_cast<std::int64_t>(0));
    if (r.contains("raw")) {
      ro.raw = r["raw"].get<std::vector<double>>();
    } else {
      if (!rubric) throw rr::Error(rr::ErrorCode::SchemaViolation, "scoring rollouts need a rubric");
      const json& s = r.at("scoring");
      auto scoring = rr::parse_scoring(s.is_string() ? s.get<std::string>() : s.dump(),
                                       o.strict ? rr::CallStrictness::Strict
                                                : rr::CallStrictness::Lenient);
      for (const auto& cs : rr::score_response(*rubric, scoring, mode, verifier_from(o))) {
        ro.raw.push_back(cs.raw);
      }
    }
    out.push_back(std::move(ro));
  }
  return out;
}

int cmd_aggregate(const Options& o) {
  rr::AggregationConfig cfg;
  cfg.tau = o.tau;
  if (o.max_length > 0) cfg.max_length = o.max_length;
  cfg.format_rules_enabled = !o.no_format_rules;
  return run_batch(
      o, "aggregate",
      [&](const rr::InputLine&, const json& j) {
        std::vector<rr::CriterionMeta> meta = meta_from(j);
        std::vector<rr::Rollout> rollouts = rollouts_from(j, o);
        if (o.group_size && rollouts.size() != o.group_size) {
          throw rr::Error(rr::ErrorCode::ArgumentError,
                          "group has " + std::to_string(rollouts.size()) +
                              " rollouts, --group-size is " + std::to_string(o.group_size));
        }
        auto breakdowns = rr::aggregate_group(meta, rollouts, cfg);
        bool saturated = std::all_of(breakdowns.begin(), breakdowns.end(),
                                     [](const auto& b) { return b.advantage == 0.0; });
        rr::ordered_json out;
        out["id"] = j.contains("id") ? j["id"] : json();
        out["zero_variance"] = saturated;
        rr::ordered_json arr = rr::ordered_json::array();
        double sum = 0.0;
        for (const auto& b : breakdowns) {
          arr.push_back(rr::breakdown_to_json(b));
          sum += b.final;
        }
        out["rollouts"] = arr;
        RecordResult r;
        r.line = out.dump();
        r.value = sum / breakdowns.size();
        r.flag = saturated;
        return r;
      },
      [](const std::vector<RecordResult>& rs) {
        std::vector<double> v;
        std::size_t zero_var = 0;
        for (const auto& r : rs) {
          if (r.error) continue;
          v.push_back(r.value);
          zero_var += r.flag;
        }
        std::fprintf(stderr, "aggregate: mean reward %.4f, %zu zero-variance groups (advantages 0)\n",
                     mean_of(v), zero_var);
      });
}

int cmd_filter(const Options& o) {
  if (o.mode != "any" && o.mode != "essential") {
    std::cerr << "filter: --mode must be any or essential\n";
    return 2;
  }
  const rr::FilterMode mode = o.mode == "any" ? rr::FilterMode::Any : rr::FilterMode::Essential;
  return run_batch(
      o, "filter",
      [&](const rr::InputLine&, const json& j) {
        rr::InstanceScores inst;
        inst.id = j.at("id").is_string() ? j["id"].get<std::string>() : j["id"].dump();
        for (const auto& m : meta_from(j)) inst.types.push_back(m.ctype);
        for (auto& ro : rollouts_from(j, o)) inst.rollouts.push_back(std::move(ro.raw));
        RecordResult r;
        r.flag = !rr::filter_instances({inst}, mode).empty();
        if (r.flag) r.line = rr::ordered_json{{"id", inst.id}, {"mode", o.mode}}.dump();
        return r;
      },
      [&](const std::vector<RecordResult>& rs) {
        std::size_t kept = 0;
        for (const auto& r : rs) kept += r.flag && !r.error;
        std::fprintf(stderr, "filter: retained %zu (mode %s)\n", kept, o.mode.c_str());
      });
}

int cmd_audit(const Options& o) {
  std::vector<rr::InputLine> lines = rr::read_lines(o.input);
  std::vector<rr::AuditRecord> records;
  std::size_t errors = 0;
  for (const auto& line : lines) {
    try {
      records.push_back(rr::audit_record_from_json(rr::parse_line(line)));
    } catch (const rr::Error& e) {
      ++errors;
      std::cerr << "audit: line " << line.lineno << ": " << e.what() << "\n";
      if (o.strict) return exit_code_for(e.code());
    }
  }
  rr::AuditConfig cfg;
  cfg.fp_threshold = o.fp_threshold;
  cfg.content.similarity_pass = o.similarity_pass;
  cfg.content.verifier = verifier_from(o);
  rr::AuditMetrics m = rr::evaluate_genrm(records, cfg);
  rr::write_lines(o.output, {rr::audit_report_json(m, cfg)});
  std::string table = rr::audit_report_table(m);
  if (!o.table.empty()) {
    rr::write_lines(o.table, {table});
  } else if (o.output != "-") {
    std::cout << table;
  }
  std::cerr << "audit: " << records.size() << " records, " << errors << " errors\n";
  return 0;
}

int cmd_build_audit_set(const Options& o) {
  auto generator = make_transport(o, o.replay_file);
  if (!generator) {
    std::cerr << "build-audit-set: --transport is required\n";
    return 3;
  }
  std::unique_ptr<rr::GenerationTransport> reviewer;
  if (!o.reviewer_replay_file.empty()) reviewer = make_transport(o, o.reviewer_replay_file);
  rr::GenerationTransport& review = reviewer ? *reviewer : *generator;

  std::vector<rr::SourceInstance> sources;
  for (const auto& line : rr::read_lines(o.input)) {
    json j = rr::parse_line(line);
    sources.push_back({rr::task_from_json(j), rr::rubric_field(j, "rubric")});
  }
  rr::BuilderConfig cfg;
  cfg.parallelism = o.parallelism;
  cfg.fill_genrm_output = o.fill_genrm;
  cfg.policy = policy_from(o);
  rr::BuildOutcome outcome =
      rr::build_audit_set(sources, *generator, review, review, cfg, generator.get());
  std::vector<std::string> out;
  for (const auto& r : outcome.accepted) out.push_back(rr::audit_record_to_json(r).dump());
  rr::write_lines(o.output, out);
  for (const auto& why : outcome.rejected) std::cerr << "build-audit-set: rejected " << why << "\n";
  std::cerr << "build-audit-set: " << outcome.accepted.size() << " accepted, "
            << outcome.rejected.size() << " rejected\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Rubric reward engine: verifiers, scoring, aggregation and audits"};
  app.require_subcommand(1);
  Options o;

  auto add_io = [&](CLI::App* sub) {
    sub->add_option("--input", o.input, "Record-per-line input file")->required()->check(CLI::ExistingFile);
    sub->add_option("--output", o.output, "Output file ('-' for stdout)");
    sub->add_flag("--strict", o.strict, "Abort on the first record error");
    sub->add_option("--parallelism", o.parallelism, "Worker threads")->check(CLI::PositiveNumber);
    sub->add_option("--point-scale", o.point_scale, "Point proximity scale")->check(CLI::PositiveNumber);
  };
  auto add_transport = [&](CLI::App* sub) {
    sub->add_option("--transport", o.transport, "Generation transport")
        ->check(CLI::IsMember({"replay", "http"}));
    sub->add_option("--replay-file", o.replay_file, "Recorded replies for --transport replay");
    sub->add_option("--exposure", o.exposure, "Exposure mode")
        ->check(CLI::IsMember({"minimal", "unlimited"}));
  };

  std::string target_call, predict_call;
  auto* verify = app.add_subcommand("verify", "Run one target/predict call pair");
  verify->add_option("target", target_call, "Rubric-side call")->required();
  verify->add_option("predict", predict_call, "Scoring-side call")->required();
  verify->add_option("--point-scale", o.point_scale, "Point proximity scale")->check(CLI::PositiveNumber);

  auto* score = app.add_subcommand("score", "Per-criterion raw scores for each record");
  add_io(score);
  add_transport(score);
  score->add_option("--retries", o.retries, "Parse retries per request")->check(CLI::NonNegativeNumber);

  auto* aggregate = app.add_subcommand("aggregate", "Rewards and advantages per rollout group");
  add_io(aggregate);
  aggregate->add_option("--tau", o.tau, "Remap threshold")->check(CLI::Bound(1e-9, 1 - 1e-9));
  aggregate->add_option("--max-length", o.max_length, "Response length limit in tokens");
  aggregate->add_option("--group-size", o.group_size, "Expected rollouts per group")
      ->check(CLI::Range(2, 1 << 20));
  aggregate->add_flag("--no-format-rules", o.no_format_rules, "Disable the format mask");

  auto* filter = app.add_subcommand("filter", "Keep instances with a failing rollout");
  add_io(filter);
  filter->add_option("--mode", o.mode, "any or essential");

  auto* audit = app.add_subcommand("audit", "Reward-model reliability metrics");
  add_io(audit);
  audit->add_option("--fp-threshold", o.fp_threshold, "Score counted as credit")
      ->check(CLI::Bound(0.0, 1.0));
  audit->add_option("--similarity-pass", o.similarity_pass, "Similarity pass bar")
      ->check(CLI::Bound(0.0, 1.0));
  audit->add_option("--table", o.table, "Write the text table here");

  auto* build = app.add_subcommand("build-audit-set", "Construct abnormal-response audit records");
  add_io(build);
  add_transport(build);
  build->add_option("--reviewer-replay-file", o.reviewer_replay_file,
                    "Separate replies for the reviewer calls");
  build->add_flag("--fill-genrm", o.fill_genrm, "Also request a scoring of each response");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  }

  try {
    if (*verify) return cmd_verify(target_call, predict_call, o);
    if (*score) return cmd_score(o);
    if (*aggregate) return cmd_aggregate(o);
    if (*filter) return cmd_filter(o);
    if (*audit) return cmd_audit(o);
    if (*build) return cmd_build_audit_set(o);
  } catch (const rr::Error& e) {
    std::cerr << e.what() << "\n";
    return exit_code_for(e.code());
  } catch (const json::exception& e) {
    std::cerr << "MalformedDocument: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
