#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace rubric_reward {

enum class ErrorCode {
  MalformedDocument,
  SchemaViolation,
  CallParseError,
  CreditDomainError,
  ArgumentError,
  FormatError,
  RoleMismatch,
  MergeConflict,
  VerifierError,
  PairingError,
  TransportError,
  ParseFailureAfterRetries,
  GroupTooSmall,
  NoMatchingTeacher,
  EmptyAuditSet,
  EmptyCategory,
  IoError,
};

std::string_view to_string(ErrorCode code);

// Single exception type for the whole engine. The code identifies the
// taxonomy entry; `offset` is set for call-grammar errors (byte offset into
// the call text).
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message,
        std::optional<std::size_t> offset = std::nullopt);

  ErrorCode code() const noexcept { return code_; }
  std::optional<std::size_t> offset() const noexcept { return offset_; }
  /// Message without the code prefix and offset suffix.
  const std::string& message() const noexcept { return message_; }

 private:
  ErrorCode code_;
  std::string message_;
  std::optional<std::size_t> offset_;
};

}  // namespace rubric_reward
