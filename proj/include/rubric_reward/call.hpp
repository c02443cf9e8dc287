#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

namespace rubric_reward {

enum class VerifierName {
  Text,
  Expr,
  Time,
  List,
  Bbox,
  Point,
};

inline constexpr VerifierName kAllVerifiers[] = {
    VerifierName::Text, VerifierName::Expr, VerifierName::Time,
    VerifierName::List, VerifierName::Bbox, VerifierName::Point};

std::string_view name_of(VerifierName name);
std::optional<VerifierName> verifier_from_name(std::string_view name);

// Returns the verifier whose name starts `text` (after leading whitespace),
// if any. Used to decide whether a reference/credit string is a call.
std::optional<VerifierName> leading_verifier_name(std::string_view text);

/// `[]` parses to EmptyList; typed accessors below accept it for any list
/// type.
struct EmptyList {
  bool operator==(const EmptyList&) const = default;
};

using StringList = std::vector<std::string>;
using StringMatrix = std::vector<StringList>;
using IntList = std::vector<std::int64_t>;
using IntMatrix = std::vector<IntList>;

using Literal = std::variant<std::string, bool, std::int64_t, EmptyList,
                             StringList, IntList, IntMatrix, StringMatrix>;

std::optional<std::string> as_string(const Literal& lit);
std::optional<bool> as_bool(const Literal& lit);
std::optional<StringList> as_string_list(const Literal& lit);
std::optional<StringMatrix> as_string_matrix(const Literal& lit);
std::optional<IntMatrix> as_int_matrix(const Literal& lit);

std::string literal_to_string(const Literal& lit);

struct VerifierCall {
  VerifierName name = VerifierName::Text;
  std::vector<std::pair<std::string, Literal>> args;

  const Literal* find(std::string_view key) const;
  bool has(std::string_view key) const { return find(key) != nullptr; }

  bool operator==(const VerifierCall&) const = default;
};

enum class CallSide { Target, Predict };

/// Parses `name(key=literal, ...)`. Keyword arguments only; literals are
/// strings (optionally r-prefixed), True/False, integers, and lists nested
/// at most two deep. Argument names and literal types are checked against
/// the verifier's signature. Throws Error{CallParseError} with a byte offset.
VerifierCall parse_call(std::string_view text);

/// Checks that every argument belongs to `side` and that the side's
/// required arguments are present. Throws Error{CallParseError}.
void check_call_side(const VerifierCall& call, CallSide side);

/// Combines rubric-side and scoring-side calls into one argument set.
/// Throws Error{MergeConflict} on a shared keyword or differing names.
VerifierCall merge_calls(const VerifierCall& target_side,
                         const VerifierCall& predict_side);

/// Canonical call text; parse_call(to_string(c)) == c.
std::string to_string(const VerifierCall& call);

// Signature strings shown to the extractor and the rubric generator.
std::string rubric_signature(VerifierName name);
std::string scoring_signature(VerifierName name);

/// String renderings of the target-side arguments that are hidden from the
/// extractor (target, candidates, tformat). Used by exposure audits.
std::vector<std::string> target_literals(const VerifierCall& call);

}  // namespace rubric_reward
