#include "rubric_reward/verifiers.hpp"

#include <algorithm>
#include <cmath>

#include "rubric_reward/error.hpp"
#include "rubric_reward/expr.hpp"
#include "rubric_reward/time_parse.hpp"

namespace rubric_reward {

namespace {

int clamp_coord(std::int64_t v) {
  return static_cast<int>(std::clamp<std::int64_t>(v, 0, kCoordMax));
}

[[noreturn]] void argument_error(const VerifierCall& call, const std::string& what) {
  throw Error(ErrorCode::ArgumentError, std::string(name_of(call.name)) + ": " + what);
}

std::string string_arg(const VerifierCall& call, std::string_view key) {
  const Literal* lit = call.find(key);
  if (!lit) argument_error(call, "missing '" + std::string(key) + "'");
  auto s = as_string(*lit);
  if (!s) argument_error(call, "'" + std::string(key) + "' must be a string");
  return *s;
}

bool flag_arg(const VerifierCall& call, std::string_view key) {
  const Literal* lit = call.find(key);
  if (!lit) return false;
  auto b = as_bool(*lit);
  if (!b) argument_error(call, "'" + std::string(key) + "' must be a boolean");
  return *b;
}

}  // namespace

Box Box::canonical(std::int64_t x1, std::int64_t y1, std::int64_t x2, std::int64_t y2) {
  int ax = clamp_coord(x1), bx = clamp_coord(x2);
  int ay = clamp_coord(y1), by = clamp_coord(y2);
  return Box{std::min(ax, bx), std::min(ay, by), std::max(ax, bx), std::max(ay, by)};
}

Point Point::canonical(std::int64_t x, std::int64_t y) {
  return Point{clamp_coord(x), clamp_coord(y)};
}

double iou(const Box& a, const Box& b) {
  if (a.area() == 0 || b.area() == 0) return a == b ? 1.0 : 0.0;
  long long iw = std::min(a.x2, b.x2) - std::max(a.x1, b.x1);
  long long ih = std::min(a.y2, b.y2) - std::max(a.y1, b.y1);
  if (iw <= 0 || ih <= 0) return 0.0;
  long long inter = iw * ih;
  long long uni = a.area() + b.area() - inter;
  return static_cast<double>(inter) / static_cast<double>(uni);
}

double point_proximity(const Point& a, const Point& b, double scale) {
  double d = std::hypot(static_cast<double>(a.x - b.x), static_cast<double>(a.y - b.y));
  return std::max(0.0, 1.0 - d / scale);
}

double matched_mean(const ScoreMatrix& target_by_predict, std::size_t targets,
                    std::size_t predicts) {
  if (predicts == 0) return targets == 0 ? 1.0 : 0.0;
  if (targets == 0) return 0.0;
  Assignment a = hungarian(target_by_predict);
  double score = a.total / static_cast<double>(std::max(targets, predicts));
  return std::clamp(score, 0.0, 1.0);
}

static double list_score(const StringList& target, const StringList& predict,
                         const TextOptions& options) {
  ScoreMatrix m(target.size(), std::vector<double>(predict.size()));
  for (std::size_t i = 0; i < target.size(); ++i) {
    for (std::size_t j = 0; j < predict.size(); ++j) {
      m[i][j] = text_similarity(target[i], predict[j], {}, options);
    }
  }
  return matched_mean(m, target.size(), predict.size());
}

double list_verify(const std::optional<StringList>& target,
                   const std::optional<StringMatrix>& candidates,
                   const StringList& predict, const TextOptions& options) {
  if (target.has_value() == candidates.has_value()) {
    throw Error(ErrorCode::ArgumentError,
                "list_verify needs exactly one of target or candidates");
  }
  if (target) return list_score(*target, predict, options);
  double best = 0.0;
  for (const auto& c : *candidates) best = std::max(best, list_score(c, predict, options));
  return best;
}

double bbox_verify(const std::vector<Box>& target, const std::vector<Box>& predict) {
  if (target.empty()) throw Error(ErrorCode::ArgumentError, "bbox_verify: empty target");
  ScoreMatrix m(target.size(), std::vector<double>(predict.size()));
  for (std::size_t i = 0; i < target.size(); ++i) {
    for (std::size_t j = 0; j < predict.size(); ++j) m[i][j] = iou(target[i], predict[j]);
  }
  return matched_mean(m, target.size(), predict.size());
}

double point_verify(const std::vector<Point>& target, const std::vector<Point>& predict,
                    double scale) {
  if (target.empty()) throw Error(ErrorCode::ArgumentError, "point_verify: empty target");
  if (!(scale > 0.0)) throw Error(ErrorCode::ArgumentError, "point_verify: scale must be positive");
  ScoreMatrix m(target.size(), std::vector<double>(predict.size()));
  for (std::size_t i = 0; i < target.size(); ++i) {
    for (std::size_t j = 0; j < predict.size(); ++j) {
      m[i][j] = point_proximity(target[i], predict[j], scale);
    }
  }
  return matched_mean(m, target.size(), predict.size());
}

std::optional<std::vector<Box>> boxes_from(const Literal& lit) {
  auto rows = as_int_matrix(lit);
  if (!rows) return std::nullopt;
  std::vector<Box> out;
  for (const auto& r : *rows) {
    if (r.size() != 4) return std::nullopt;
    out.push_back(Box::canonical(r[0], r[1], r[2], r[3]));
  }
  return out;
}

std::optional<std::vector<Point>> points_from(const Literal& lit) {
  auto rows = as_int_matrix(lit);
  if (!rows) return std::nullopt;
  std::vector<Point> out;
  for (const auto& r : *rows) {
    if (r.size() != 2) return std::nullopt;
    out.push_back(Point::canonical(r[0], r[1]));
  }
  return out;
}

bool is_binary_verifier(VerifierName name) {
  return name == VerifierName::Expr || name == VerifierName::Time;
}

double run_verifier(const VerifierCall& call, const VerifierConfig& config) {
  switch (call.name) {
    case VerifierName::Text: {
      TextFlags flags;
      flags.use_latex = flag_arg(call, "use_latex");
      flags.ignore_space = flag_arg(call, "ignore_space");
      flags.ignore_punc = flag_arg(call, "ignore_punc");
      flags.ignore_case = flag_arg(call, "ignore_case");
      flags.ignore_st = flag_arg(call, "ignore_st");
      std::optional<std::string> target;
      std::optional<StringList> candidates;
      if (const Literal* t = call.find("target")) {
        target = as_string(*t);
        if (!target) argument_error(call, "'target' must be a string");
      }
      if (const Literal* c = call.find("candidates")) {
        candidates = as_string_list(*c);
        if (!candidates) argument_error(call, "'candidates' must be a list of strings");
      }
      return text_verify(target, candidates, string_arg(call, "predict"), flags, config.text);
    }
    case VerifierName::Expr:
      return expr_verify(string_arg(call, "target"), string_arg(call, "predict"));
    case VerifierName::Time:
      return time_verify(string_arg(call, "target"), string_arg(call, "tformat"),
                         string_arg(call, "predict"), string_arg(call, "pformat"));
    case VerifierName::List: {
      std::optional<StringList> target;
      std::optional<StringMatrix> candidates;
      if (const Literal* t = call.find("target")) {
        target = as_string_list(*t);
        if (!target) argument_error(call, "'target' must be a list of strings");
      }
      if (const Literal* c = call.find("candidates")) {
        candidates = as_string_matrix(*c);
        if (!candidates) argument_error(call, "'candidates' must be a list of string lists");
      }
      const Literal* p = call.find("predict");
      if (!p) argument_error(call, "missing 'predict'");
      auto predict = as_string_list(*p);
      if (!predict) return 0.0;
      return list_verify(target, candidates, *predict, config.text);
    }
    case VerifierName::Bbox: {
      const Literal* t = call.find("target");
      const Literal* p = call.find("predict");
      if (!t) argument_error(call, "missing 'target'");
      if (!p) argument_error(call, "missing 'predict'");
      auto target = boxes_from(*t);
      if (!target || target->empty()) argument_error(call, "malformed target boxes");
      auto predict = boxes_from(*p);
      if (!predict) return 0.0;
      return bbox_verify(*target, *predict);
    }
    case VerifierName::Point: {
      const Literal* t = call.find("target");
      const Literal* p = call.find("predict");
      if (!t) argument_error(call, "missing 'target'");
      if (!p) argument_error(call, "missing 'predict'");
      auto target = points_from(*t);
      if (!target || target->empty()) argument_error(call, "malformed target points");
      auto predict = points_from(*p);
      if (!predict) return 0.0;
      return point_verify(*target, *predict, config.point_scale);
    }
  }
  throw Error(ErrorCode::VerifierError, "unknown verifier");
}

}  // namespace rubric_reward
