#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>

namespace rubric_reward {

enum class Script {
  Auto,  // the dominant script of the response itself
  Latin,
  Greek,
  Cyrillic,
  Armenian,
  Hebrew,
  Arabic,
  Devanagari,
  Thai,
  Hangul,
  Cjk,  // Han, kana and bopomofo
  Other,
};

std::string_view to_string(Script s);
std::optional<Script> script_from_name(std::string_view name);

/// Script of a letter code point, or nullopt for non-letters (digits,
/// punctuation, symbols, spaces).
std::optional<Script> letter_script(char32_t c);

struct FormatRuleSet {
  bool repetition_enabled = true;
  std::size_t ngram = 20;
  /// A character n-gram counts as looping once it occurs this many times.
  std::size_t min_repeats = 3;
  double max_repetition_ngram_fraction = 0.5;

  bool language_enabled = true;
  Script expected_script = Script::Auto;
  double max_foreign_char_fraction = 0.2;

  void validate() const;
};

/// Fraction of code points covered by some n-gram that occurs at least
/// `min_repeats` times. 0 for texts shorter than n.
double repetition_fraction(std::string_view text, std::size_t n, std::size_t min_repeats);

/// Removes fenced and inline code plus $...$, $$...$$, \(...\) and \[...\].
std::string strip_code_and_formulas(std::string_view text);

/// Fraction of letters outside `expected` after stripping code and formulas.
/// With Script::Auto the most frequent script is expected. 0 if no letters.
double foreign_letter_fraction(std::string_view text, Script expected);

struct FormatVerdict {
  bool repetition = false;
  bool language_mixing = false;
  int mask() const { return repetition || language_mixing ? 0 : 1; }
};

FormatVerdict check_format(std::string_view response, const FormatRuleSet& rules = {});
int format_mask(std::string_view response, const FormatRuleSet& rules = {});

}  // namespace rubric_reward
