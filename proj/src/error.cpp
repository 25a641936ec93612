#include "ro/error.hpp"

namespace ro {

const char* error_code_name(ErrorCode c) {
    switch (c) {
    case ErrorCode::SchemeMismatch: return "SchemeMismatch";
    case ErrorCode::AttrCollision: return "AttrCollision";
    case ErrorCode::UnknownAttribute: return "UnknownAttribute";
    case ErrorCode::TypeMismatch: return "TypeMismatch";
    case ErrorCode::DuplicateName: return "DuplicateName";
    case ErrorCode::UnknownScalarType: return "UnknownScalarType";
    case ErrorCode::UnknownType: return "UnknownType";
    case ErrorCode::UnknownParent: return "UnknownParent";
    case ErrorCode::UnknownComponent: return "UnknownComponent";
    case ErrorCode::KeyFieldUnknown: return "KeyFieldUnknown";
    case ErrorCode::ForeignKeyTargetNotGlobal: return "ForeignKeyTargetNotGlobal";
    case ErrorCode::CannotAlterInherited: return "CannotAlterInherited";
    case ErrorCode::ImplKindMismatch: return "ImplKindMismatch";
    case ErrorCode::ExprTypeError: return "ExprTypeError";
    case ErrorCode::CycleDetected: return "CycleDetected";
    case ErrorCode::AmbiguousRealization: return "AmbiguousRealization";
    case ErrorCode::UnknownOid: return "UnknownOid";
    case ErrorCode::UnrealizedComponent: return "UnrealizedComponent";
    case ErrorCode::TypeInUse: return "TypeInUse";
    case ErrorCode::ReferentialVeto: return "ReferentialVeto";
    case ErrorCode::KeyViolation: return "KeyViolation";
    case ErrorCode::RefIntegrityViolation: return "RefIntegrityViolation";
    case ErrorCode::CtorArityMismatch: return "CtorArityMismatch";
    case ErrorCode::NotARefAttribute: return "NotARefAttribute";
    case ErrorCode::NoOidAttribute: return "NoOidAttribute";
    case ErrorCode::UnresolvablePath: return "UnresolvablePath";
    case ErrorCode::NotWritable: return "NotWritable";
    case ErrorCode::NonBooleanCondition: return "NonBooleanCondition";
    case ErrorCode::UnknownName: return "UnknownName";
    case ErrorCode::ArityMismatch: return "ArityMismatch";
    case ErrorCode::LoopLimitExceeded: return "LoopLimitExceeded";
    case ErrorCode::EvaluationError: return "EvaluationError";
    case ErrorCode::SyntaxError: return "SyntaxError";
    case ErrorCode::IoError: return "IoError";
    case ErrorCode::FormatVersionMismatch: return "FormatVersionMismatch";
    case ErrorCode::IntegrityCheckFailed: return "IntegrityCheckFailed";
    case ErrorCode::UsageError: return "UsageError";
    }
    return "UnknownError";
}

} // namespace ro
