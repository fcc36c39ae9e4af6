#include "patch/error.hpp"

namespace patch {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::MalformedIdentifier: return "malformed-identifier";
    case ErrorKind::IncompatibleAssignment: return "incompatible-assignment";
    case ErrorKind::IndexOutOfRange: return "index-out-of-range";
    case ErrorKind::NotIndexable: return "not-indexable";
    case ErrorKind::NoSuchField: return "no-such-field";
    case ErrorKind::TypeMismatch: return "type-mismatch";
    case ErrorKind::DivisionByZero: return "division-by-zero";
    case ErrorKind::ArithOverflow: return "arith-overflow";
    case ErrorKind::DomainError: return "domain-error";
    case ErrorKind::UnboundVariable: return "unbound-variable";
    case ErrorKind::BudgetExceeded: return "budget-exceeded";
    case ErrorKind::CallDepthExceeded: return "call-depth-exceeded";
    case ErrorKind::ReadFailed: return "read-failed";
    case ErrorKind::ArityMismatch: return "arity-mismatch";
    case ErrorKind::AmbiguousMapping: return "ambiguous-mapping";
    case ErrorKind::Unresolvable: return "unresolvable";
    case ErrorKind::UnknownModule: return "unknown-module";
    case ErrorKind::UnknownSession: return "unknown-session";
    case ErrorKind::UnsupportedConstruct: return "unsupported-construct";
    case ErrorKind::ToolchainMissing: return "toolchain-missing";
    case ErrorKind::ParseError: return "parse-error";
    case ErrorKind::VersionUnsupported: return "version-unsupported";
    case ErrorKind::LiteralSyntaxError: return "literal-syntax-error";
    case ErrorKind::InvalidProgram: return "invalid-program";
    case ErrorKind::Io: return "io-error";
  }
  return "unknown";
}

PatchError::PatchError(ErrorKind kind, const std::string& message, std::string step_id)
    : std::runtime_error(message), kind_(kind), step_id_(std::move(step_id)) {}

}  // namespace patch
