#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <filesystem>
#include <functional>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

#include <json.hpp>

#include "rubric_reward/aggregation.hpp"
#include "rubric_reward/audit.hpp"
#include "rubric_reward/execution.hpp"

namespace rubric_reward {

struct InputLine {
  std::size_t lineno = 0;  // 1-based
  std::string text;
};

/// Non-blank lines of a record-per-line file. Throws IoError.
std::vector<InputLine> read_lines(const std::filesystem::path& path);

/// Writes one record per line; "-" writes to standard output.
void write_lines(const std::filesystem::path& path, const std::vector<std::string>& lines);

/// Runs fn(i) for i in [0, n) on up to `parallelism` threads. Results keep
/// index order. The first exception (lowest index) is rethrown after all
/// workers finish.
template <typename T>
std::vector<T> parallel_map(std::size_t n, std::size_t parallelism,
                            const std::function<T(std::size_t)>& fn) {
  std::vector<T> results(n);
  std::vector<std::exception_ptr> errors(n);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < n; i = next++) {
      try {
        results[i] = fn(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  std::size_t threads = std::clamp<std::size_t>(parallelism, 1, std::max<std::size_t>(n, 1));
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(worker);
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return results;
}

// JSON codecs for the batch formats. Rubric and scoring fields may be given
// as nested objects or as JSON text.

using nlohmann::ordered_json;

Rubric rubric_field(const nlohmann::json& j, std::string_view key);
std::string text_field(const nlohmann::json& j, std::string_view key);

TaskInstance task_from_json(const nlohmann::json& j);

CriterionLabel label_from_json(const nlohmann::json& j);
ordered_json label_to_json(const CriterionLabel& label);

AuditRecord audit_record_from_json(const nlohmann::json& j);
ordered_json audit_record_to_json(const AuditRecord& record);

ordered_json criterion_score_to_json(const CriterionScore& score);
ordered_json breakdown_to_json(const RewardBreakdown& b);

/// Parses a JSON line, throwing MalformedDocument with the line number.
nlohmann::json parse_line(const InputLine& line);

}  // namespace rubric_reward
