#pragma once

#include <stdexcept>
#include <string>

namespace ro {

enum class ErrorCode {
    SchemeMismatch,
    AttrCollision,
    UnknownAttribute,
    TypeMismatch,
    DuplicateName,
    UnknownScalarType,
    UnknownType,
    UnknownParent,
    UnknownComponent,
    KeyFieldUnknown,
    ForeignKeyTargetNotGlobal,
    CannotAlterInherited,
    ImplKindMismatch,
    ExprTypeError,
    CycleDetected,
    AmbiguousRealization,
    UnknownOid,
    UnrealizedComponent,
    TypeInUse,
    ReferentialVeto,
    KeyViolation,
    RefIntegrityViolation,
    CtorArityMismatch,
    NotARefAttribute,
    NoOidAttribute,
    UnresolvablePath,
    NotWritable,
    NonBooleanCondition,
    UnknownName,
    ArityMismatch,
    LoopLimitExceeded,
    EvaluationError,
    SyntaxError,
    IoError,
    FormatVersionMismatch,
    IntegrityCheckFailed,
    UsageError,
};

const char* error_code_name(ErrorCode c);

/// Single exception type used across the engine; the code keeps error
/// classes testable without a taxonomy of exception classes.
class Error : public std::runtime_error {
  public:
    Error(ErrorCode code, std::string message)
        : std::runtime_error(std::string(error_code_name(code)) + ": " + message), code_(code) {}

    ErrorCode code() const { return code_; }

  private:
    ErrorCode code_;
};

} // namespace ro
