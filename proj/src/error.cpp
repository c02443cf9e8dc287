#include "rubric_reward/error.hpp"

namespace rubric_reward {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::MalformedDocument: return "MalformedDocument";
    case ErrorCode::SchemaViolation: return "SchemaViolation";
    case ErrorCode::CallParseError: return "CallParseError";
    case ErrorCode::CreditDomainError: return "CreditDomainError";
    case ErrorCode::ArgumentError: return "ArgumentError";
    case ErrorCode::FormatError: return "FormatError";
    case ErrorCode::RoleMismatch: return "RoleMismatch";
    case ErrorCode::MergeConflict: return "MergeConflict";
    case ErrorCode::VerifierError: return "VerifierError";
    case ErrorCode::PairingError: return "PairingError";
    case ErrorCode::TransportError: return "TransportError";
    case ErrorCode::ParseFailureAfterRetries: return "ParseFailureAfterRetries";
    case ErrorCode::GroupTooSmall: return "GroupTooSmall";
    case ErrorCode::NoMatchingTeacher: return "NoMatchingTeacher";
    case ErrorCode::EmptyAuditSet: return "EmptyAuditSet";
    case ErrorCode::EmptyCategory: return "EmptyCategory";
    case ErrorCode::IoError: return "IoError";
  }
  return "Unknown";
}

static std::string decorate(ErrorCode code, const std::string& message,
                            std::optional<std::size_t> offset) {
  std::string out(to_string(code));
  out += ": ";
  out += message;
  if (offset) {
    out += " (at byte ";
    out += std::to_string(*offset);
    out += ")";
  }
  return out;
}

Error::Error(ErrorCode code, const std::string& message,
             std::optional<std::size_t> offset)
    : std::runtime_error(decorate(code, message, offset)),
      code_(code),
      message_(message),
      offset_(offset) {}

}  // namespace rubric_reward
