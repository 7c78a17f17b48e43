#pragma once

#include <stdexcept>
#include <string>

namespace ttkit {

enum class ErrorCode {
  MalformedSlots = 1,
  UnknownBranch,
  UnknownCurve,
  UnknownName,
  NotLargeBranch,
  NotMixedBranch,
  NotCollapsible,
  TieCollision,
  MeasureNotCarried,
  Ambiguous,
  NeitherCarries,
  NotCarried,
  NotCarriedBySplit,
  CarriedBySplit,
  IncompatibleLocalPicture,
  NotInCone,
  RadiusExceeded,
  ExceptionalSurface,
  SignatureMismatch,
  InvalidGluing,
  NonTermination,
  ParseError,
  BadMoveSequence,
  Internal,
};

const char* error_code_name(ErrorCode c);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(error_code_name(code)) + ": " + what),
        code_(code) {}

  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) {
  throw Error(code, what);
}

}  // namespace ttkit
