#include "rubric_reward/text.hpp"

#include <algorithm>
#include <array>

#include "rubric_reward/error.hpp"

namespace rubric_reward {

std::string_view trim(std::string_view s) {
  auto space = [](char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v'; };
  while (!s.empty() && space(s.front())) s.remove_prefix(1);
  while (!s.empty() && space(s.back())) s.remove_suffix(1);
  return s;
}

std::u32string decode_utf8(std::string_view s) {
  std::u32string out;
  out.reserve(s.size());
  std::size_t i = 0;
  while (i < s.size()) {
    auto b0 = static_cast<unsigned char>(s[i]);
    int len = b0 < 0x80 ? 1 : (b0 >> 5) == 0x6 ? 2 : (b0 >> 4) == 0xE ? 3 : (b0 >> 3) == 0x1E ? 4 : 0;
    if (len == 0 || i + len > s.size()) {
      out.push_back(U'�');
      ++i;
      continue;
    }
    char32_t cp = len == 1 ? b0 : len == 2 ? (b0 & 0x1F) : len == 3 ? (b0 & 0x0F) : (b0 & 0x07);
    bool ok = true;
    for (int k = 1; k < len; ++k) {
      auto b = static_cast<unsigned char>(s[i + k]);
      if ((b & 0xC0) != 0x80) {
        ok = false;
        break;
      }
      cp = (cp << 6) | (b & 0x3F);
    }
    if (!ok || cp > 0x10FFFF || (cp >= 0xD800 && cp <= 0xDFFF)) {
      out.push_back(U'�');
      ++i;
      continue;
    }
    out.push_back(cp);
    i += len;
  }
  return out;
}

std::string encode_utf8(std::u32string_view s) {
  std::string out;
  out.reserve(s.size());
  for (char32_t cp : s) {
    if (cp < 0x80) {
      out.push_back(static_cast<char>(cp));
    } else if (cp < 0x800) {
      out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
      out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    } else if (cp < 0x10000) {
      out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
      out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
      out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    } else {
      out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
      out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
      out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
      out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    }
  }
  return out;
}

char32_t fold_case(char32_t c) {
  if (c >= U'A' && c <= U'Z') return c + 32;
  if (c >= 0xC0 && c <= 0xDE && c != 0xD7) return c + 32;    // Latin-1
  if (c >= 0x391 && c <= 0x3A9 && c != 0x3A2) return c + 32;  // Greek
  if (c >= 0x410 && c <= 0x42F) return c + 32;                // Cyrillic
  if (c >= 0x400 && c <= 0x40F) return c + 80;
  if (c >= 0xFF21 && c <= 0xFF3A) return c + 32;              // fullwidth
  return c;
}

bool is_unicode_space(char32_t c) {
  return c == U' ' || (c >= 0x09 && c <= 0x0D) || c == 0x85 || c == 0xA0 ||
         c == 0x1680 || (c >= 0x2000 && c <= 0x200B) || c == 0x2028 ||
         c == 0x2029 || c == 0x202F || c == 0x205F || c == 0x3000 || c == 0xFEFF;
}

bool is_unicode_punct(char32_t c) {
  if (c < 0x80) {
    return (c >= 0x21 && c <= 0x2F) || (c >= 0x3A && c <= 0x40) ||
           (c >= 0x5B && c <= 0x60) || (c >= 0x7B && c <= 0x7E);
  }
  return (c >= 0xA1 && c <= 0xBF && c != 0xAA && c != 0xB5 && c != 0xBA) ||
         c == 0xD7 || c == 0xF7 || (c >= 0x2010 && c <= 0x2027) ||
         (c >= 0x2030 && c <= 0x205E) || (c >= 0x3001 && c <= 0x3003) ||
         (c >= 0x3008 && c <= 0x3011) || (c >= 0x3014 && c <= 0x301F) ||
         (c >= 0xFF01 && c <= 0xFF0F) || (c >= 0xFF1A && c <= 0xFF20) ||
         (c >= 0xFF3B && c <= 0xFF40) || (c >= 0xFF5B && c <= 0xFF65);
}

std::size_t levenshtein(std::u32string_view a, std::u32string_view b) {
  if (a.size() < b.size()) std::swap(a, b);
  if (b.empty()) return a.size();
  std::vector<std::size_t> row(b.size() + 1);
  for (std::size_t j = 0; j <= b.size(); ++j) row[j] = j;
  for (std::size_t i = 1; i <= a.size(); ++i) {
    std::size_t diag = row[0];
    row[0] = i;
    for (std::size_t j = 1; j <= b.size(); ++j) {
      std::size_t up = row[j];
      std::size_t sub = diag + (a[i - 1] == b[j - 1] ? 0 : 1);
      row[j] = std::min({up + 1, row[j - 1] + 1, sub});
      diag = up;
    }
  }
  return row[b.size()];
}

namespace {

bool starts_with_at(std::string_view s, std::size_t i, std::string_view p) {
  return s.substr(i, p.size()) == p;
}

bool is_alpha(char c) { return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z'); }

// Index one past the brace group opening at `open`, or npos if unbalanced.
std::size_t match_brace(std::string_view s, std::size_t open) {
  int depth = 0;
  for (std::size_t i = open; i < s.size(); ++i) {
    if (s[i] == '\\' && i + 1 < s.size()) {
      ++i;
      continue;
    }
    if (s[i] == '{') ++depth;
    if (s[i] == '}' && --depth == 0) return i + 1;
  }
  return std::string_view::npos;
}

}  // namespace

std::string canonicalize_latex(std::string_view s) {
  static constexpr std::array<std::string_view, 8> kUnwrap = {
      "\\text", "\\mathrm", "\\textbf", "\\mathbf", "\\textit", "\\mathit",
      "\\operatorname", "\\boxed"};
  static constexpr std::array<std::string_view, 7> kDrop = {
      "\\displaystyle", "\\left", "\\right", "\\qquad", "\\quad", "\\limits", "\\nolimits"};
  std::string out;
  std::size_t i = 0;
  while (i < s.size()) {
    char c = s[i];
    if (c == '$') {
      ++i;
      continue;
    }
    if (c != '\\') {
      out.push_back(c);
      ++i;
      continue;
    }
    if (i + 1 < s.size() && std::string_view(",;:! ()[]").find(s[i + 1]) != std::string_view::npos) {
      i += 2;  // spacing commands and \( \) \[ \] delimiters
      continue;
    }
    std::size_t end = i + 1;
    while (end < s.size() && is_alpha(s[end])) ++end;
    std::string_view cmd = s.substr(i, end - i);
    if (std::find(kDrop.begin(), kDrop.end(), cmd) != kDrop.end()) {
      i = end;
      continue;
    }
    if (cmd == "\\dfrac" || cmd == "\\tfrac") {
      out += "\\frac";
      i = end;
      continue;
    }
    if (std::find(kUnwrap.begin(), kUnwrap.end(), cmd) != kUnwrap.end()) {
      std::size_t j = end;
      while (j < s.size() && s[j] == ' ') ++j;
      if (j < s.size() && s[j] == '{') {
        std::size_t close = match_brace(s, j);
        if (close != std::string_view::npos) {
          out += canonicalize_latex(s.substr(j + 1, close - j - 2));
          i = close;
          continue;
        }
      }
    }
    out.append(cmd);
    i = end;
  }
  // Collapse whitespace runs.
  std::string collapsed;
  bool pending_space = false;
  for (char ch : out) {
    if (ch == ' ' || ch == '\t' || ch == '\n' || ch == '\r') {
      pending_space = !collapsed.empty();
      continue;
    }
    if (pending_space) collapsed.push_back(' ');
    pending_space = false;
    collapsed.push_back(ch);
  }
  return collapsed;
}

std::u32string normalize_text(std::string_view s, const TextFlags& flags,
                              const TextOptions& options) {
  std::string base = flags.use_latex ? canonicalize_latex(s) : std::string(s);
  if (flags.ignore_st) {
    std::string_view view = base;
    bool changed = true;
    while (changed) {
      changed = false;
      std::string_view t = trim(view);
      if (t.size() != view.size()) changed = true;
      view = t;
      for (const auto& m : options.strip_markers) {
        if (m.empty()) continue;
        if (starts_with_at(view, 0, m)) {
          view.remove_prefix(m.size());
          changed = true;
        }
        if (view.size() >= m.size() && view.substr(view.size() - m.size()) == m) {
          view.remove_suffix(m.size());
          changed = true;
        }
      }
    }
    base = std::string(view);
  }
  std::u32string cps = decode_utf8(base);
  std::u32string out;
  out.reserve(cps.size());
  for (char32_t c : cps) {
    if (flags.ignore_case) c = fold_case(c);
    if (flags.ignore_punc && is_unicode_punct(c)) continue;
    if (flags.ignore_space && is_unicode_space(c)) continue;
    out.push_back(c);
  }
  return out;
}

double text_similarity(std::string_view a, std::string_view b, const TextFlags& flags,
                       const TextOptions& options) {
  std::u32string na = normalize_text(a, flags, options);
  std::u32string nb = normalize_text(b, flags, options);
  std::size_t longest = std::max(na.size(), nb.size());
  if (longest == 0) return 1.0;
  if (na == nb) return 1.0;
  double d = static_cast<double>(levenshtein(na, nb));
  return 1.0 - d / static_cast<double>(longest);
}

double text_verify(const std::optional<std::string>& target,
                   const std::optional<std::vector<std::string>>& candidates,
                   std::string_view predict, const TextFlags& flags,
                   const TextOptions& options) {
  if (target.has_value() == candidates.has_value()) {
    throw Error(ErrorCode::ArgumentError,
                "text_verify needs exactly one of target or candidates");
  }
  if (target) return text_similarity(*target, predict, flags, options);
  double best = 0.0;
  for (const auto& c : *candidates) {
    best = std::max(best, text_similarity(c, predict, flags, options));
  }
  return best;
}

}  // namespace rubric_reward
