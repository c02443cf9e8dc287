#include "rubric_reward/prompts.hpp"

#include "rubric_reward/error.hpp"

namespace rubric_reward {

namespace {

std::string_view usage(VerifierName name) {
  switch (name) {
    case VerifierName::Text:
      return "Optical or directly extractive text, including LaTeX transcriptions. "
             "Returns a normalized text similarity in [0, 1]; with candidates, the "
             "best candidate score.";
    case VerifierName::Expr:
      return "Option letters, numbers and mathematical expressions stated in the "
             "response. Returns 1 iff target and prediction are mathematically "
             "equivalent. Keep units and context in the criterion.";
    case VerifierName::Time:
      return "Dates and times written with Python-style datetime directives. The "
             "prediction format is copied from how the response writes the value. "
             "Returns 1 iff the parsed values are equal.";
    case VerifierName::List:
      return "Extractive lists of text items, such as OCR key fields. Returns the "
             "Hungarian-matched text similarity; each candidate list is one "
             "complete valid answer set.";
    case VerifierName::Bbox:
      return "Bounding-box grounding, one or more boxes [x1, y1, x2, y2] with "
             "coordinates normalized to 0-1000. Returns Hungarian-matched IoU "
             "normalized by the larger number of boxes.";
    case VerifierName::Point:
      return "Point grounding, one or more points [x, y] with coordinates "
             "normalized to 0-1000. Returns a Hungarian-matched proximity score.";
  }
  return "";
}

}  // namespace

std::string_view prompt_asset(std::string_view name) {
  for (const auto& [key, text] : detail::prompt_table()) {
    if (key == name) return text;
  }
  throw Error(ErrorCode::ArgumentError, "unknown prompt asset '" + std::string(name) + "'");
}

std::vector<std::string> prompt_asset_names() {
  std::vector<std::string> out;
  for (const auto& [key, text] : detail::prompt_table()) out.emplace_back(key);
  return out;
}

std::string render_template(std::string_view tmpl,
                            const std::map<std::string, std::string>& vars) {
  std::string out;
  std::size_t i = 0;
  while (i < tmpl.size()) {
    std::size_t open = tmpl.find("{{", i);
    if (open == std::string_view::npos) {
      out.append(tmpl.substr(i));
      break;
    }
    std::size_t close = tmpl.find("}}", open + 2);
    if (close == std::string_view::npos) {
      out.append(tmpl.substr(i));
      break;
    }
    out.append(tmpl.substr(i, open - i));
    std::string key(tmpl.substr(open + 2, close - open - 2));
    auto it = vars.find(key);
    if (it != vars.end()) {
      out += it->second;
    } else {
      out.append(tmpl.substr(open, close + 2 - open));
    }
    i = close + 2;
  }
  return out;
}

std::string verifier_specs(CallSide side, std::span<const VerifierName> allowed) {
  std::string out;
  for (VerifierName v : allowed) {
    out += "- ";
    out += side == CallSide::Target ? rubric_signature(v) : scoring_signature(v);
    out += "\n  ";
    out += usage(v);
    out += "\n";
  }
  if (side == CallSide::Predict) {
    out +=
        "If the response states no prediction, pass an empty string or an empty list "
        "as predict. For coordinate tools, copy the coordinates as the response "
        "writes them, even when they are irregular.\n";
  } else {
    out +=
        "Text and list tools are for extractive text; box and point tools are for "
        "grounding targets. Never use a tool to encode a judgment as a Boolean "
        "target, and keep the target value out of the criterion text.\n";
  }
  return out;
}

std::string rubric_output_schema() {
  return R"JSON({"essential": [{"criterion": "string", "reference": "string", "weight": 1 | 2 | 3}], "additional": [...]})JSON";
}

std::string scoring_output_schema() {
  return R"JSON({"thought": "string", "essential": [{"criterion": "string", "rationale": "string", "credit": 0 | 0.5 | 1 | "<name>_verify(predict=...)"}], "additional": [...]})JSON";
}

std::string rubric_generation_prompt(std::span<const VerifierName> allowed,
                                     bool dual_verification) {
  return render_template(
      prompt_asset("rubric_generation"),
      {{"verifier_specs", verifier_specs(CallSide::Target, allowed)},
       {"dual_verification",
        dual_verification ? std::string(prompt_asset("dual_verification")) : ""},
       {"output_schema", rubric_output_schema()}});
}

std::string rubric_aggregation_prompt(std::span<const VerifierName> allowed) {
  return render_template(prompt_asset("rubric_aggregation"),
                         {{"verifier_specs", verifier_specs(CallSide::Target, allowed)},
                          {"output_schema", rubric_output_schema()}});
}

std::string response_scoring_prompt(std::span<const VerifierName> allowed) {
  return render_template(prompt_asset("response_scoring"),
                         {{"verifier_specs", verifier_specs(CallSide::Predict, allowed)},
                          {"output_schema", scoring_output_schema()}});
}

}  // namespace rubric_reward
