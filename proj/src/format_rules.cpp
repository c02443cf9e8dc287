#include "rubric_reward/format_rules.hpp"

#include <array>
#include <string>
#include <unordered_map>

#include "rubric_reward/error.hpp"
#include "rubric_reward/text.hpp"

namespace rubric_reward {

namespace {

constexpr std::array<std::pair<Script, std::string_view>, 12> kScriptNames{{
    {Script::Auto, "auto"},
    {Script::Latin, "latin"},
    {Script::Greek, "greek"},
    {Script::Cyrillic, "cyrillic"},
    {Script::Armenian, "armenian"},
    {Script::Hebrew, "hebrew"},
    {Script::Arabic, "arabic"},
    {Script::Devanagari, "devanagari"},
    {Script::Thai, "thai"},
    {Script::Hangul, "hangul"},
    {Script::Cjk, "cjk"},
    {Script::Other, "other"},
}};

bool in(char32_t c, char32_t lo, char32_t hi) { return c >= lo && c <= hi; }

}  // namespace

std::string_view to_string(Script s) {
  for (const auto& [k, v] : kScriptNames) {
    if (k == s) return v;
  }
  return "other";
}

std::optional<Script> script_from_name(std::string_view name) {
  for (const auto& [k, v] : kScriptNames) {
    if (v == name) return k;
  }
  return std::nullopt;
}

std::optional<Script> letter_script(char32_t c) {
  if (c < 0x80) {
    if ((c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z')) return Script::Latin;
    return std::nullopt;
  }
  if (in(c, 0xC0, 0x24F) && c != 0xD7 && c != 0xF7) return Script::Latin;
  if (in(c, 0x1E00, 0x1EFF) || in(c, 0xFF21, 0xFF3A) || in(c, 0xFF41, 0xFF5A)) {
    return Script::Latin;
  }
  if (in(c, 0x370, 0x3FF) || in(c, 0x1F00, 0x1FFF)) {
    if (c == 0x37E || c == 0x387) return std::nullopt;
    return Script::Greek;
  }
  if (in(c, 0x400, 0x52F)) return Script::Cyrillic;
  if (in(c, 0x531, 0x58F)) return Script::Armenian;
  if (in(c, 0x5D0, 0x5F2)) return Script::Hebrew;
  if (in(c, 0x620, 0x64A) || in(c, 0x671, 0x6D3) || in(c, 0x750, 0x77F)) return Script::Arabic;
  if (in(c, 0x900, 0x97F)) return Script::Devanagari;
  if (in(c, 0xE01, 0xE5B)) return Script::Thai;
  if (in(c, 0xAC00, 0xD7A3) || in(c, 0x1100, 0x11FF) || in(c, 0x3130, 0x318F)) {
    return Script::Hangul;
  }
  if (in(c, 0x4E00, 0x9FFF) || in(c, 0x3400, 0x4DBF) || in(c, 0x20000, 0x2FA1F) ||
      in(c, 0xF900, 0xFAFF) || in(c, 0x3041, 0x30FF) || in(c, 0x31F0, 0x31FF) ||
      in(c, 0x3100, 0x312F) || in(c, 0xFF66, 0xFF9D)) {
    return Script::Cjk;
  }
  return std::nullopt;
}

void FormatRuleSet::validate() const {
  auto frac = [](double v) { return v >= 0.0 && v <= 1.0; };
  if (!frac(max_repetition_ngram_fraction) || !frac(max_foreign_char_fraction)) {
    throw Error(ErrorCode::ArgumentError, "format rule fractions must lie in [0, 1]");
  }
  if (ngram == 0 || min_repeats < 2) {
    throw Error(ErrorCode::ArgumentError, "repetition rule needs ngram >= 1 and min_repeats >= 2");
  }
}

double repetition_fraction(std::string_view text, std::size_t n, std::size_t min_repeats) {
  std::u32string cps = decode_utf8(text);
  if (n == 0 || cps.size() < n) return 0.0;
  std::u32string_view view(cps);
  std::unordered_map<std::u32string_view, std::size_t> counts;
  const std::size_t windows = cps.size() - n + 1;
  counts.reserve(windows);
  for (std::size_t i = 0; i < windows; ++i) ++counts[view.substr(i, n)];

  // Mark covered positions with a difference array over looping windows.
  std::vector<int> delta(cps.size() + 1, 0);
  for (std::size_t i = 0; i < windows; ++i) {
    if (counts[view.substr(i, n)] >= min_repeats) {
      ++delta[i];
      --delta[i + n];
    }
  }
  std::size_t covered = 0;
  int running = 0;
  for (std::size_t i = 0; i < cps.size(); ++i) {
    running += delta[i];
    if (running > 0) ++covered;
  }
  return static_cast<double>(covered) / static_cast<double>(cps.size());
}

std::string strip_code_and_formulas(std::string_view text) {
  struct Delim {
    std::string_view open, close;
  };
  // Longest openers first so ``` wins over ` and $$ over $.
  static constexpr Delim kDelims[] = {
      {"```", "```"}, {"$$", "$$"}, {"\\[", "\\]"}, {"\\(", "\\)"}, {"`", "`"}, {"$", "$"},
  };
  std::string out;
  out.reserve(text.size());
  std::size_t i = 0;
  while (i < text.size()) {
    bool skipped = false;
    for (const Delim& d : kDelims) {
      if (text.compare(i, d.open.size(), d.open) != 0) continue;
      std::size_t end = text.find(d.close, i + d.open.size());
      if (end == std::string_view::npos) break;
      out += ' ';
      i = end + d.close.size();
      skipped = true;
      break;
    }
    if (!skipped) out += text[i++];
  }
  return out;
}

double foreign_letter_fraction(std::string_view text, Script expected) {
  std::string prose = strip_code_and_formulas(text);
  std::unordered_map<Script, std::size_t> counts;
  std::size_t total = 0;
  for (char32_t c : decode_utf8(prose)) {
    if (auto s = letter_script(c)) {
      ++counts[*s];
      ++total;
    }
  }
  if (total == 0) return 0.0;
  if (expected == Script::Auto) {
    std::size_t best = 0;
    for (const auto& [s, n] : counts) {
      if (n > best || (n == best && s < expected)) {
        best = n;
        expected = s;
      }
    }
  }
  std::size_t native = counts.count(expected) ? counts[expected] : 0;
  return static_cast<double>(total - native) / static_cast<double>(total);
}

FormatVerdict check_format(std::string_view response, const FormatRuleSet& rules) {
  rules.validate();
  FormatVerdict v;
  if (rules.repetition_enabled) {
    v.repetition = repetition_fraction(response, rules.ngram, rules.min_repeats) >
                   rules.max_repetition_ngram_fraction;
  }
  if (rules.language_enabled) {
    v.language_mixing =
        foreign_letter_fraction(response, rules.expected_script) > rules.max_foreign_char_fraction;
  }
  return v;
}

int format_mask(std::string_view response, const FormatRuleSet& rules) {
  return check_format(response, rules).mask();
}

}  // namespace rubric_reward
