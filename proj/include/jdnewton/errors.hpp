#pragma once

#include <stdexcept>
#include <string>

namespace jdn {

enum class ErrorCode {
  NotSkew,
  NotSquare,
  ShapeMismatch,
  NotStiefel,
  RankDeficient,
  NumericalBreakdown,
  AnchorMismatch,
  NotTangent,
  SingularHessian,
  SingularCovariance,
  IndexOutOfRange,
  AsymmetricInput,
  InvalidArgument,
  ParseError,
  IoError,
};

const char* to_string(ErrorCode code);

/// Every failure raised by the library carries one of the codes above so the
/// CLI can map it to an exit status without parsing messages.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

inline const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::NotSkew: return "NotSkew";
    case ErrorCode::NotSquare: return "NotSquare";
    case ErrorCode::ShapeMismatch: return "ShapeMismatch";
    case ErrorCode::NotStiefel: return "NotStiefel";
    case ErrorCode::RankDeficient: return "RankDeficient";
    case ErrorCode::NumericalBreakdown: return "NumericalBreakdown";
    case ErrorCode::AnchorMismatch: return "AnchorMismatch";
    case ErrorCode::NotTangent: return "NotTangent";
    case ErrorCode::SingularHessian: return "SingularHessian";
    case ErrorCode::SingularCovariance: return "SingularCovariance";
    case ErrorCode::IndexOutOfRange: return "IndexOutOfRange";
    case ErrorCode::AsymmetricInput: return "AsymmetricInput";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::IoError: return "IoError";
  }
  return "Unknown";
}

}  // namespace jdn
