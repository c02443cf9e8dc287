#include "rubric_reward/call.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <limits>

#include "rubric_reward/error.hpp"

namespace rubric_reward {

namespace {

enum class ArgKind { Str, Bool, StrList, StrMatrix, IntMatrix, Any };

struct ArgSpec {
  std::string_view key;
  CallSide side;
  ArgKind kind;
  std::string_view type_text;
};

// Coordinate verifiers accept any literal on the predict side: irregular
// predictions are scored 0 by the verifier rather than rejected here.
constexpr std::array<ArgSpec, 8> kTextArgs{{
    {"target", CallSide::Target, ArgKind::Str, "str = None"},
    {"candidates", CallSide::Target, ArgKind::StrList, "List[str] = None"},
    {"use_latex", CallSide::Target, ArgKind::Bool, "bool = False"},
    {"ignore_space", CallSide::Target, ArgKind::Bool, "bool = False"},
    {"ignore_punc", CallSide::Target, ArgKind::Bool, "bool = False"},
    {"ignore_case", CallSide::Target, ArgKind::Bool, "bool = False"},
    {"ignore_st", CallSide::Target, ArgKind::Bool, "bool = False"},
    {"predict", CallSide::Predict, ArgKind::Str, "str"},
}};
constexpr std::array<ArgSpec, 2> kExprArgs{{
    {"target", CallSide::Target, ArgKind::Str, "str"},
    {"predict", CallSide::Predict, ArgKind::Str, "str"},
}};
constexpr std::array<ArgSpec, 4> kTimeArgs{{
    {"target", CallSide::Target, ArgKind::Str, "str"},
    {"tformat", CallSide::Target, ArgKind::Str, "str"},
    {"predict", CallSide::Predict, ArgKind::Str, "str"},
    {"pformat", CallSide::Predict, ArgKind::Str, "str"},
}};
constexpr std::array<ArgSpec, 3> kListArgs{{
    {"target", CallSide::Target, ArgKind::StrList, "List[str] = None"},
    {"candidates", CallSide::Target, ArgKind::StrMatrix,
     "List[List[str]] = None"},
    {"predict", CallSide::Predict, ArgKind::StrList, "List[str]"},
}};
constexpr std::array<ArgSpec, 2> kBoxArgs{{
    {"target", CallSide::Target, ArgKind::IntMatrix, "List[List[int]]"},
    {"predict", CallSide::Predict, ArgKind::Any, "List[List[int]]"},
}};

struct SpecView {
  const ArgSpec* begin;
  const ArgSpec* end;
};

SpecView specs_for(VerifierName name) {
  switch (name) {
    case VerifierName::Text: return {kTextArgs.data(), kTextArgs.data() + kTextArgs.size()};
    case VerifierName::Expr: return {kExprArgs.data(), kExprArgs.data() + kExprArgs.size()};
    case VerifierName::Time: return {kTimeArgs.data(), kTimeArgs.data() + kTimeArgs.size()};
    case VerifierName::List: return {kListArgs.data(), kListArgs.data() + kListArgs.size()};
    case VerifierName::Bbox:
    case VerifierName::Point: return {kBoxArgs.data(), kBoxArgs.data() + kBoxArgs.size()};
  }
  return {nullptr, nullptr};
}

const ArgSpec* find_spec(VerifierName name, std::string_view key) {
  auto [b, e] = specs_for(name);
  for (auto* it = b; it != e; ++it) {
    if (it->key == key) return it;
  }
  return nullptr;
}

bool kind_accepts(ArgKind kind, const Literal& lit) {
  switch (kind) {
    case ArgKind::Str: return std::holds_alternative<std::string>(lit);
    case ArgKind::Bool: return std::holds_alternative<bool>(lit);
    case ArgKind::StrList: return as_string_list(lit).has_value();
    case ArgKind::StrMatrix: return as_string_matrix(lit).has_value();
    case ArgKind::IntMatrix: return as_int_matrix(lit).has_value();
    case ArgKind::Any: return true;
  }
  return false;
}

bool is_ident_start(char c) {
  return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_';
}
bool is_ident_char(char c) { return is_ident_start(c) || (c >= '0' && c <= '9'); }
bool is_space(char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r'; }

class CallParser {
 public:
  explicit CallParser(std::string_view text) : text_(text) {}

  VerifierCall parse() {
    skip_ws();
    std::size_t name_pos = pos_;
    std::string ident = identifier();
    if (ident.empty()) fail("expected verifier name", name_pos);
    auto name = verifier_from_name(ident);
    if (!name) fail("unknown verifier '" + ident + "'", name_pos);
    VerifierCall call;
    call.name = *name;

    skip_ws();
    expect('(');
    skip_ws();
    while (peek() != ')') {
      if (at_end()) fail("unbalanced parentheses", pos_);
      std::size_t arg_pos = pos_;
      std::string key = identifier();
      skip_ws();
      if (key.empty() || peek() != '=') {
        fail("positional argument", arg_pos);
      }
      ++pos_;
      skip_ws();
      std::size_t lit_pos = pos_;
      Literal lit = literal(0);
      if (call.has(key)) fail("duplicate keyword '" + key + "'", arg_pos);
      const ArgSpec* spec = find_spec(call.name, key);
      if (!spec) {
        fail("unknown keyword '" + key + "' for " + std::string(name_of(call.name)),
             arg_pos);
      }
      if (!kind_accepts(spec->kind, lit)) {
        fail("type mismatch for '" + key + "', expected " +
                 std::string(spec->type_text),
             lit_pos);
      }
      call.args.emplace_back(std::move(key), std::move(lit));
      skip_ws();
      if (peek() == ',') {
        ++pos_;
        skip_ws();
        continue;
      }
      if (peek() != ')') {
        if (at_end()) fail("unbalanced parentheses", pos_);
        fail("expected ',' or ')'", pos_);
      }
    }
    ++pos_;
    skip_ws();
    if (!at_end()) fail("trailing characters after call", pos_);
    return call;
  }

 private:
  [[noreturn]] void fail(const std::string& what, std::size_t at) const {
    throw Error(ErrorCode::CallParseError, what, at);
  }

  bool at_end() const { return pos_ >= text_.size(); }
  char peek() const { return at_end() ? '\0' : text_[pos_]; }

  void skip_ws() {
    while (!at_end() && is_space(text_[pos_])) ++pos_;
  }

  void expect(char c) {
    if (peek() != c) {
      fail(std::string("expected '") + c + "'", pos_);
    }
    ++pos_;
  }

  std::string identifier() {
    if (at_end() || !is_ident_start(text_[pos_])) return {};
    std::size_t start = pos_;
    while (!at_end() && is_ident_char(text_[pos_])) ++pos_;
    return std::string(text_.substr(start, pos_ - start));
  }

  Literal literal(int depth) {
    char c = peek();
    if (c == '[') return list(depth);
    if (c == '\'' || c == '"') return string_literal(false);
    if ((c == 'r' || c == 'R') && pos_ + 1 < text_.size() &&
        (text_[pos_ + 1] == '\'' || text_[pos_ + 1] == '"')) {
      ++pos_;
      return string_literal(true);
    }
    if (c == '-' || (c >= '0' && c <= '9')) return integer();
    if (is_ident_start(c)) {
      std::size_t start = pos_;
      std::string word = identifier();
      if (word == "True") return true;
      if (word == "False") return false;
      fail("unsupported literal '" + word + "'", start);
    }
    if (at_end()) fail("unbalanced parentheses", pos_);
    fail("unsupported literal", pos_);
  }

  std::string string_literal(bool raw) {
    std::size_t start = pos_;
    char quote = text_[pos_++];
    std::string out;
    while (true) {
      if (at_end()) fail("unterminated string", start);
      char c = text_[pos_++];
      if (c == quote) break;
      if (c == '\\') {
        if (at_end()) fail("unterminated string", start);
        char next = text_[pos_];
        if (raw) {
          // Raw strings keep the backslash; an escaped quote does not close.
          out.push_back('\\');
          out.push_back(next);
          ++pos_;
        } else if (next == '\\' || next == '\'' || next == '"') {
          out.push_back(next);
          ++pos_;
        } else {
          // Other escapes are kept verbatim so LaTeX such as \frac survives.
          out.push_back('\\');
        }
        continue;
      }
      out.push_back(c);
    }
    return out;
  }

  std::int64_t integer() {
    std::size_t start = pos_;
    if (peek() == '-') ++pos_;
    std::size_t digits = pos_;
    while (!at_end() && text_[pos_] >= '0' && text_[pos_] <= '9') ++pos_;
    if (pos_ == digits) fail("unsupported literal", start);
    if (!at_end() && (text_[pos_] == '.' || text_[pos_] == 'e' ||
                      text_[pos_] == 'E' || is_ident_char(text_[pos_]))) {
      fail("unsupported literal (only integers are allowed)", start);
    }
    std::int64_t value = 0;
    auto res = std::from_chars(text_.data() + start, text_.data() + pos_, value);
    if (res.ec != std::errc()) fail("integer out of range", start);
    return value;
  }

  Literal list(int depth) {
    std::size_t start = pos_;
    if (depth >= 2) fail("lists nested deeper than two levels", start);
    expect('[');
    skip_ws();
    std::vector<Literal> items;
    while (peek() != ']') {
      if (at_end()) fail("unbalanced brackets", start);
      std::size_t item_pos = pos_;
      Literal item = literal(depth + 1);
      if (std::holds_alternative<bool>(item)) {
        fail("unsupported list element", item_pos);
      }
      items.push_back(std::move(item));
      skip_ws();
      if (peek() == ',') {
        ++pos_;
        skip_ws();
        continue;
      }
      if (peek() != ']') {
        if (at_end()) fail("unbalanced brackets", start);
        fail("expected ',' or ']'", pos_);
      }
    }
    ++pos_;
    if (items.empty()) return EmptyList{};
    return unify(items, start);
  }

  Literal unify(const std::vector<Literal>& items, std::size_t at) const {
    bool all_str = true, all_int = true, all_nested = true;
    for (const auto& it : items) {
      all_str = all_str && std::holds_alternative<std::string>(it);
      all_int = all_int && std::holds_alternative<std::int64_t>(it);
      all_nested = all_nested && (std::holds_alternative<EmptyList>(it) ||
                                  std::holds_alternative<StringList>(it) ||
                                  std::holds_alternative<IntList>(it));
    }
    if (all_str) {
      StringList out;
      for (const auto& it : items) out.push_back(std::get<std::string>(it));
      return out;
    }
    if (all_int) {
      IntList out;
      for (const auto& it : items) out.push_back(std::get<std::int64_t>(it));
      return out;
    }
    if (all_nested) {
      bool any_str = false, any_int = false;
      for (const auto& it : items) {
        any_str = any_str || std::holds_alternative<StringList>(it);
        any_int = any_int || std::holds_alternative<IntList>(it);
      }
      if (any_str && any_int) fail("mixed list element types", at);
      if (any_str) {
        StringMatrix out;
        for (const auto& it : items) {
          out.push_back(std::holds_alternative<StringList>(it)
                            ? std::get<StringList>(it)
                            : StringList{});
        }
        return out;
      }
      IntMatrix out;
      for (const auto& it : items) {
        out.push_back(std::holds_alternative<IntList>(it) ? std::get<IntList>(it)
                                                          : IntList{});
      }
      return out;
    }
    fail("mixed list element types", at);
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

void append_quoted(std::string& out, const std::string& s) {
  out.push_back('\'');
  for (char c : s) {
    if (c == '\\' || c == '\'') out.push_back('\\');
    out.push_back(c);
  }
  out.push_back('\'');
}

template <typename T, typename F>
void append_list(std::string& out, const std::vector<T>& items, F&& each) {
  out.push_back('[');
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (i) out += ", ";
    each(items[i]);
  }
  out.push_back(']');
}

}  // namespace

std::string_view name_of(VerifierName name) {
  switch (name) {
    case VerifierName::Text: return "text_verify";
    case VerifierName::Expr: return "expr_verify";
    case VerifierName::Time: return "time_verify";
    case VerifierName::List: return "list_verify";
    case VerifierName::Bbox: return "bbox_verify";
    case VerifierName::Point: return "point_verify";
  }
  return "";
}

std::optional<VerifierName> verifier_from_name(std::string_view name) {
  for (auto v : kAllVerifiers) {
    if (name_of(v) == name) return v;
  }
  return std::nullopt;
}

std::optional<VerifierName> leading_verifier_name(std::string_view text) {
  std::size_t i = 0;
  while (i < text.size() && is_space(text[i])) ++i;
  text.remove_prefix(i);
  for (auto v : kAllVerifiers) {
    if (text.substr(0, name_of(v).size()) == name_of(v)) return v;
  }
  return std::nullopt;
}

std::optional<std::string> as_string(const Literal& lit) {
  if (auto* s = std::get_if<std::string>(&lit)) return *s;
  return std::nullopt;
}

std::optional<bool> as_bool(const Literal& lit) {
  if (auto* b = std::get_if<bool>(&lit)) return *b;
  return std::nullopt;
}

std::optional<StringList> as_string_list(const Literal& lit) {
  if (std::holds_alternative<EmptyList>(lit)) return StringList{};
  if (auto* l = std::get_if<StringList>(&lit)) return *l;
  return std::nullopt;
}

std::optional<StringMatrix> as_string_matrix(const Literal& lit) {
  if (std::holds_alternative<EmptyList>(lit)) return StringMatrix{};
  if (auto* m = std::get_if<StringMatrix>(&lit)) return *m;
  if (auto* m = std::get_if<IntMatrix>(&lit)) {
    // [[]] and [[], []] parse as integer matrices with empty rows.
    if (std::all_of(m->begin(), m->end(), [](const IntList& r) { return r.empty(); })) {
      return StringMatrix(m->size());
    }
  }
  return std::nullopt;
}

std::optional<IntMatrix> as_int_matrix(const Literal& lit) {
  if (std::holds_alternative<EmptyList>(lit)) return IntMatrix{};
  if (auto* m = std::get_if<IntMatrix>(&lit)) return *m;
  return std::nullopt;
}

std::string literal_to_string(const Literal& lit) {
  std::string out;
  std::visit(
      [&](const auto& v) {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, std::string>) {
          append_quoted(out, v);
        } else if constexpr (std::is_same_v<T, bool>) {
          out += v ? "True" : "False";
        } else if constexpr (std::is_same_v<T, std::int64_t>) {
          out += std::to_string(v);
        } else if constexpr (std::is_same_v<T, EmptyList>) {
          out += "[]";
        } else if constexpr (std::is_same_v<T, StringList>) {
          append_list(out, v, [&](const std::string& s) { append_quoted(out, s); });
        } else if constexpr (std::is_same_v<T, IntList>) {
          append_list(out, v, [&](std::int64_t n) { out += std::to_string(n); });
        } else if constexpr (std::is_same_v<T, IntMatrix>) {
          append_list(out, v, [&](const IntList& row) {
            append_list(out, row, [&](std::int64_t n) { out += std::to_string(n); });
          });
        } else if constexpr (std::is_same_v<T, StringMatrix>) {
          append_list(out, v, [&](const StringList& row) {
            append_list(out, row, [&](const std::string& s) { append_quoted(out, s); });
          });
        }
      },
      lit);
  return out;
}

const Literal* VerifierCall::find(std::string_view key) const {
  for (const auto& [k, v] : args) {
    if (k == key) return &v;
  }
  return nullptr;
}

VerifierCall parse_call(std::string_view text) { return CallParser(text).parse(); }

void check_call_side(const VerifierCall& call, CallSide side) {
  for (const auto& [key, value] : call.args) {
    const ArgSpec* spec = find_spec(call.name, key);
    if (!spec || spec->side != side) {
      throw Error(ErrorCode::CallParseError,
                  "argument '" + key + "' is not allowed in a " +
                      (side == CallSide::Target ? "rubric-side" : "scoring-side") +
                      " call",
                  std::size_t{0});
    }
  }
  auto require = [&](std::string_view key) {
    if (!call.has(key)) {
      throw Error(ErrorCode::CallParseError,
                  "missing argument '" + std::string(key) + "' for " +
                      std::string(name_of(call.name)),
                  std::size_t{0});
    }
  };
  if (side == CallSide::Predict) {
    require("predict");
    if (call.name == VerifierName::Time) require("pformat");
    return;
  }
  switch (call.name) {
    case VerifierName::Text:
    case VerifierName::List:
      if (call.has("target") == call.has("candidates")) {
        throw Error(ErrorCode::CallParseError,
                    "exactly one of 'target' or 'candidates' is required",
                    std::size_t{0});
      }
      break;
    case VerifierName::Time:
      require("target");
      require("tformat");
      break;
    default:
      require("target");
  }
}

VerifierCall merge_calls(const VerifierCall& target_side,
                         const VerifierCall& predict_side) {
  if (target_side.name != predict_side.name) {
    throw Error(ErrorCode::MergeConflict,
                "verifier mismatch: rubric names " +
                    std::string(name_of(target_side.name)) + ", scoring names " +
                    std::string(name_of(predict_side.name)));
  }
  VerifierCall merged = target_side;
  for (const auto& [key, value] : predict_side.args) {
    if (merged.has(key)) {
      throw Error(ErrorCode::MergeConflict,
                  "keyword '" + key + "' supplied by both rubric and scoring");
    }
    merged.args.emplace_back(key, value);
  }
  return merged;
}

std::string to_string(const VerifierCall& call) {
  std::string out(name_of(call.name));
  out.push_back('(');
  for (std::size_t i = 0; i < call.args.size(); ++i) {
    if (i) out += ", ";
    out += call.args[i].first;
    out.push_back('=');
    out += literal_to_string(call.args[i].second);
  }
  out.push_back(')');
  return out;
}

static std::string signature(VerifierName name, CallSide side) {
  std::string out(name_of(name));
  out.push_back('(');
  bool first = true;
  auto [b, e] = specs_for(name);
  for (auto* it = b; it != e; ++it) {
    if (it->side != side) continue;
    if (!first) out += ", ";
    first = false;
    out += it->key;
    out += ": ";
    out += it->type_text;
  }
  out.push_back(')');
  return out;
}

std::string rubric_signature(VerifierName name) {
  return signature(name, CallSide::Target);
}

std::string scoring_signature(VerifierName name) {
  return signature(name, CallSide::Predict);
}

std::vector<std::string> target_literals(const VerifierCall& call) {
  std::vector<std::string> out;
  auto add = [&](const std::string& s) {
    if (!s.empty()) out.push_back(s);
  };
  for (const auto& [key, value] : call.args) {
    if (key != "target" && key != "candidates" && key != "tformat") continue;
    if (auto s = as_string(value)) add(*s);
    if (auto* l = std::get_if<StringList>(&value)) {
      for (const auto& s : *l) add(s);
    }
    if (auto* m = std::get_if<StringMatrix>(&value)) {
      for (const auto& row : *m) {
        for (const auto& s : row) add(s);
      }
    }
    if (auto* m = std::get_if<IntMatrix>(&value)) {
      for (const auto& row : *m) {
        std::string spaced, compact;
        for (std::size_t i = 0; i < row.size(); ++i) {
          spaced += (i ? ", " : "") + std::to_string(row[i]);
          compact += (i ? "," : "") + std::to_string(row[i]);
        }
        add("[" + spaced + "]");
        add("[" + compact + "]");
      }
    }
  }
  return out;
}

}  // namespace rubric_reward
