#pragma once

#include <stdexcept>
#include <string>

namespace dtl {

enum class ErrorKind {
  NonSummable,
  DomainError,
  DependentVectors,
  NotSelfAdjoint,
  DepthExceeded,
  ChainInconsistent,
  FloatingAmbiguous,
  EmptyAuxiliarySpace,
  TruncationTooShort,
  CaseMismatch,
  IdentityViolated,
  NotApplicable,
  QsAssumptionViolated,
  NearSingular,
  ParseError,
};

const char* kind_name(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(kind_name(kind)) + ": " + what), kind_(kind) {}
  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) { throw Error(kind, what); }

}  // namespace dtl
