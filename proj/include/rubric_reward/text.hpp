#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace rubric_reward {

std::string_view trim(std::string_view s);

/// Decodes UTF-8 into code points. Invalid bytes decode to U+FFFD one byte
/// at a time, so the function is total.
std::u32string decode_utf8(std::string_view s);
std::string encode_utf8(std::u32string_view s);

/// Simple case fold for ASCII, Latin-1, Greek and Cyrillic capitals.
char32_t fold_case(char32_t c);
bool is_unicode_space(char32_t c);
bool is_unicode_punct(char32_t c);

std::size_t levenshtein(std::u32string_view a, std::u32string_view b);

struct TextFlags {
  bool use_latex = false;
  bool ignore_space = false;
  bool ignore_punc = false;
  bool ignore_case = false;
  bool ignore_st = false;
};

/// Marker substrings stripped from both ends when ignore_st is set.
struct TextOptions {
  std::vector<std::string> strip_markers = {
      "**", "__", "`", "\"", "'", "“", "”", "‘", "’",
      "「", "」", "(", ")", "[", "]", "<", ">"};
};

std::string canonicalize_latex(std::string_view s);

std::u32string normalize_text(std::string_view s, const TextFlags& flags,
                              const TextOptions& options = {});

/// 1 - levenshtein / max(len) over normalized code points; 1 when both
/// normalized strings are empty.
double text_similarity(std::string_view a, std::string_view b,
                       const TextFlags& flags = {}, const TextOptions& options = {});

/// Exactly one of `target` / `candidates` must be set (ArgumentError).
double text_verify(const std::optional<std::string>& target,
                   const std::optional<std::vector<std::string>>& candidates,
                   std::string_view predict, const TextFlags& flags = {},
                   const TextOptions& options = {});

}  // namespace rubric_reward
