// Shared lowering support for the source emitters.
#pragma once

#include <map>
#include <set>
#include <string>
#include <vector>

#include "patch/codegen.hpp"
#include "patch/error.hpp"
#include "patch/resolver.hpp"
#include "patch/typing.hpp"

namespace patch::emitter {

// Indented line buffer.
class Lines {
 public:
  explicit Lines(std::string unit = "  ") : unit_(std::move(unit)) {}
  void line(const std::string& text) {
    for (int i = 0; i < depth_; ++i) out_ += unit_;
    out_ += text;
    out_ += '\n';
  }
  void blank() { out_ += '\n'; }
  void indent() { ++depth_; }
  void dedent() { --depth_; }
  const std::string& str() const { return out_; }

 private:
  std::string unit_;
  std::string out_;
  int depth_ = 0;
};

// Modules the entry can reach through calls: entry first, callees after in
// first-call order.
std::vector<const ModuleDef*> reachable_modules(const PatchProgram& program, const ModuleDef& entry);

// Tuple types used anywhere in the given modules, in first-use order, each
// with its generated type name.
class TupleTable {
 public:
  void collect(const PatchType& t);
  const std::string& name(const PatchType& t) const;
  const std::vector<std::pair<PatchType, std::string>>& all() const { return tuples_; }

 private:
  std::vector<std::pair<PatchType, std::string>> tuples_;
};

// Per-module static facts shared by the emitters.
class ModuleFacts {
 public:
  ModuleFacts(const PatchProgram& program, const ModuleDef& m, const std::set<std::string>& reserved);

  const ModuleDef& module() const { return m_; }
  const VarTypes& vars() const { return vars_; }
  // Emitted spelling of a Patch variable.
  const std::string& local(const std::string& var) const;
  // Fresh helper name, distinct from every local.
  std::string temp(const std::string& stem);

  // Static type with unknown placeholders resolved (expected fills them
  // for empty collection literals). Throws UnsupportedConstruct when the
  // expression cannot be typed.
  PatchType type(const Expr& e) const;
  PatchType raw_type(const Expr& e) const;
  PatchType slot(const Expr& target) const;

  // Error kinds evaluating e can raise, as a bit set over ErrorKind.
  unsigned fault_kinds(const Expr& e) const;
  bool fallible(const Expr& e) const { return fault_kinds(e) != 0; }
  // Whether the evaluation order of a and b can change which error is
  // raised.
  bool order_matters(const Expr& a, const Expr& b) const;

  // Callee and mapping for a call step, resolved on static types.
  std::pair<const ModuleDef*, Mapping> resolve(const CallPayload& p) const;

  void collect_tuples(TupleTable& table) const;

 private:
  const PatchProgram& program_;
  const ModuleDef& m_;
  VarTypes vars_;
  std::map<std::string, std::string> locals_;
  std::set<std::string> used_;
  int counter_ = 0;
};

// True when one of the child sequences of s contains an EXIT step itself
// (not inside a nested construct).
bool holds_direct_exit(const ModuleDef& m, const Step& s);

std::string module_symbol(const ModuleDef& m);

[[noreturn]] void unsupported(const std::string& what);

}  // namespace patch::emitter
