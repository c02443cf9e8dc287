#pragma once

#include <map>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "rubric_reward/call.hpp"

namespace rubric_reward {

/// Raw text of an embedded template from assets/prompts (file stem).
/// Throws Error{ArgumentError} for an unknown name.
std::string_view prompt_asset(std::string_view name);
std::vector<std::string> prompt_asset_names();

/// Replaces `{{key}}` placeholders. Unknown placeholders are left as is.
std::string render_template(std::string_view tmpl,
                            const std::map<std::string, std::string>& vars);

/// Tool documentation block listing the given verifiers with the
/// rubric-side or scoring-side signature. Never contains argument values.
std::string verifier_specs(CallSide side, std::span<const VerifierName> allowed);

std::string rubric_output_schema();
std::string scoring_output_schema();

std::string rubric_generation_prompt(std::span<const VerifierName> allowed,
                                     bool dual_verification);
std::string rubric_aggregation_prompt(std::span<const VerifierName> allowed);
std::string response_scoring_prompt(std::span<const VerifierName> allowed);

namespace detail {
const std::vector<std::pair<std::string_view, std::string_view>>& prompt_table();
}

}  // namespace rubric_reward
