#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace patch {

// Every failure the library raises carries one of these kinds. The string
// names are part of the public contract: they appear in CLI diagnostics, the
// service error bodies and in the transcripts of emitted programs.
enum class ErrorKind {
  MalformedIdentifier,
  IncompatibleAssignment,
  IndexOutOfRange,
  NotIndexable,
  NoSuchField,
  TypeMismatch,
  DivisionByZero,
  ArithOverflow,
  DomainError,
  UnboundVariable,
  BudgetExceeded,
  CallDepthExceeded,
  ReadFailed,
  ArityMismatch,
  AmbiguousMapping,
  Unresolvable,
  UnknownModule,
  UnknownSession,
  UnsupportedConstruct,
  ToolchainMissing,
  ParseError,
  VersionUnsupported,
  LiteralSyntaxError,
  InvalidProgram,
  Io,
};

std::string_view to_string(ErrorKind kind);

class PatchError : public std::runtime_error {
 public:
  PatchError(ErrorKind kind, const std::string& message, std::string step_id = {});

  ErrorKind kind() const { return kind_; }
  // Step that was executing when a runtime error was raised; empty otherwise.
  const std::string& step_id() const { return step_id_; }
  void set_step_id(std::string id) { step_id_ = std::move(id); }

 private:
  ErrorKind kind_;
  std::string step_id_;
};

}  // namespace patch
