#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace flame {

enum class ErrorCode {
  InvalidArgument,
  // model definition / engine
  CyclicDependency,
  UnknownMessageType,
  UnknownMessage,
  UnknownFunction,
  PayloadMismatch,
  UndeclaredOutput,
  UndeclaredInput,
  RangeFilterOnNonPositional,
  FunctionFailed,
  // file formats
  XmlSyntax,
  DuplicateName,
  MissingField,
  UnknownField,
  UnknownAgentType,
  TypeMismatch,
  IoFailure,
  // partitioning
  ZeroPartitions,
  UnsupportedCount,
  PositionlessAgent,
  // statistics
  DegenerateVariance,
  TooFewValues,
  ZeroTotalWealth,
};

inline std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::CyclicDependency: return "CyclicDependency";
    case ErrorCode::UnknownMessageType: return "UnknownMessageType";
    case ErrorCode::UnknownMessage: return "UnknownMessage";
    case ErrorCode::UnknownFunction: return "UnknownFunction";
    case ErrorCode::PayloadMismatch: return "PayloadMismatch";
    case ErrorCode::UndeclaredOutput: return "UndeclaredOutput";
    case ErrorCode::UndeclaredInput: return "UndeclaredInput";
    case ErrorCode::RangeFilterOnNonPositional: return "RangeFilterOnNonPositional";
    case ErrorCode::FunctionFailed: return "FunctionFailed";
    case ErrorCode::XmlSyntax: return "XmlSyntax";
    case ErrorCode::DuplicateName: return "DuplicateName";
    case ErrorCode::MissingField: return "MissingField";
    case ErrorCode::UnknownField: return "UnknownField";
    case ErrorCode::UnknownAgentType: return "UnknownAgentType";
    case ErrorCode::TypeMismatch: return "TypeMismatch";
    case ErrorCode::IoFailure: return "IoFailure";
    case ErrorCode::ZeroPartitions: return "ZeroPartitions";
    case ErrorCode::UnsupportedCount: return "UnsupportedCount";
    case ErrorCode::PositionlessAgent: return "PositionlessAgent";
    case ErrorCode::DegenerateVariance: return "DegenerateVariance";
    case ErrorCode::TooFewValues: return "TooFewValues";
    case ErrorCode::ZeroTotalWealth: return "ZeroTotalWealth";
  }
  return "Unknown";
}

/// Every failure raised by the library carries one of the codes above; the
/// message holds the human-readable context (element path, agent id, ...).
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code), detail_(what) {}

  ErrorCode code() const noexcept { return code_; }
  /// The message without the error-code prefix.
  const std::string& detail() const noexcept { return detail_; }

 private:
  ErrorCode code_;
  std::string detail_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) { throw Error(code, what); }

}  // namespace flame
