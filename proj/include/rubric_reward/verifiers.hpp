#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "rubric_reward/call.hpp"
#include "rubric_reward/hungarian.hpp"
#include "rubric_reward/text.hpp"

namespace rubric_reward {

inline constexpr int kCoordMax = 1000;

/// Axis-aligned box in the 0-1000 normalized space, corners sorted.
struct Box {
  int x1 = 0, y1 = 0, x2 = 0, y2 = 0;

  /// Clamps to [0, 1000] and sorts corners.
  static Box canonical(std::int64_t x1, std::int64_t y1, std::int64_t x2, std::int64_t y2);
  long long area() const { return static_cast<long long>(x2 - x1) * (y2 - y1); }
  bool operator==(const Box&) const = default;
};

struct Point {
  int x = 0, y = 0;
  static Point canonical(std::int64_t x, std::int64_t y);
  bool operator==(const Point&) const = default;
};

struct VerifierConfig {
  /// Distance at which point proximity reaches 0 (10% of the diagonal).
  double point_scale = 141.42;
  TextOptions text;
};

double iou(const Box& a, const Box& b);
double point_proximity(const Point& a, const Point& b, double scale);

/// Hungarian-matched score sum over max(|target|, |predict|). Empty
/// predictions score 0, or 1 when the target is empty too.
double matched_mean(const ScoreMatrix& target_by_predict, std::size_t targets,
                    std::size_t predicts);

double list_verify(const std::optional<StringList>& target,
                   const std::optional<StringMatrix>& candidates,
                   const StringList& predict, const TextOptions& options = {});

double bbox_verify(const std::vector<Box>& target, const std::vector<Box>& predict);
double point_verify(const std::vector<Point>& target, const std::vector<Point>& predict,
                    double scale = VerifierConfig{}.point_scale);

/// Coordinate lists from literals. nullopt for malformed payloads.
std::optional<std::vector<Box>> boxes_from(const Literal& lit);
std::optional<std::vector<Point>> points_from(const Literal& lit);

/// Runs a merged (target + predict side) call through its verifier.
/// Throws ArgumentError/FormatError for rubric-side defects.
double run_verifier(const VerifierCall& merged, const VerifierConfig& config = {});

/// True for verifiers whose scores are in {0, 1}.
bool is_binary_verifier(VerifierName name);

}  // namespace rubric_reward
