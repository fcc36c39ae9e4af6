#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "patch/model.hpp"

namespace patch {

struct ActualSpec {
  std::optional<std::string> name;  // normalized when present
  PatchType type;
};

struct CallSignature {
  std::vector<ActualSpec> actuals;
};

// formal_of_actual[k] is the callee input bound to actual k.
struct Mapping {
  std::vector<std::string> formal_of_actual;
  friend bool operator==(const Mapping&, const Mapping&) = default;
};

// Callee inputs that a caller supplies (binding == caller), in declared order.
std::vector<const DataObjectDecl*> caller_inputs(const ModuleDef& m);

// Schema mapping from call actuals onto the callee's caller-bound inputs.
// Named actuals bind to the same-named formal first; the remaining actuals
// bind to formals for which they are the only type-compatible candidate,
// repeated until nothing changes. Anything left unbound is an error:
//   ArityMismatch      actual and formal counts differ
//   Unresolvable       some actual has no compatible formal left, or a
//                      named actual's type does not fit its formal
//   AmbiguousMapping   some actual has two or more candidates
Mapping resolve_call(const CallSignature& call, const ModuleDef& callee);

// Looks the callee up case-insensitively, then resolves the call onto it.
// Throws UnknownModule when no module has that name.
std::pair<const ModuleDef*, Mapping> resolve_module(std::string_view name,
                                                    const CallSignature& call,
                                                    const PatchProgram& program);

}  // namespace patch
