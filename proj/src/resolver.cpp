#include "patch/resolver.hpp"

#include <set>

#include "patch/error.hpp"
#include "patch/literal.hpp"

namespace patch {

std::vector<const DataObjectDecl*> caller_inputs(const ModuleDef& m) {
  std::vector<const DataObjectDecl*> out;
  for (const auto& d : m.inputs) {
    if (d.binding == Binding::Caller) out.push_back(&d);
  }
  return out;
}

Mapping resolve_call(const CallSignature& call, const ModuleDef& callee) {
  const auto formals = caller_inputs(callee);
  const std::size_t n = call.actuals.size();
  if (n != formals.size()) {
    throw PatchError(ErrorKind::ArityMismatch,
                     "module '" + callee.name + "' takes " + std::to_string(formals.size()) +
                         " argument(s), call supplies " + std::to_string(n));
  }

  std::set<std::string> seen_names;
  for (const auto& a : call.actuals) {
    if (a.name && !seen_names.insert(*a.name).second) {
      throw PatchError(ErrorKind::Unresolvable, "argument '" + *a.name + "' given twice");
    }
  }

  std::vector<int> formal_for(n, -1);
  std::vector<bool> formal_taken(formals.size(), false);

  for (std::size_t k = 0; k < n; ++k) {
    const auto& a = call.actuals[k];
    if (!a.name) continue;
    for (std::size_t f = 0; f < formals.size(); ++f) {
      if (formals[f]->name != *a.name) continue;
      if (!compatible(a.type, formals[f]->type)) {
        throw PatchError(ErrorKind::Unresolvable,
                         "argument '" + *a.name + "' of type " + render_type(a.type) +
                             " does not fit " + render_type(formals[f]->type));
      }
      formal_for[k] = static_cast<int>(f);
      formal_taken[f] = true;
    }
  }

  auto candidates = [&](std::size_t k) {
    std::vector<std::size_t> out;
    for (std::size_t f = 0; f < formals.size(); ++f) {
      if (!formal_taken[f] && compatible(call.actuals[k].type, formals[f]->type)) {
        out.push_back(f);
      }
    }
    return out;
  };

  bool changed = true;
  while (changed) {
    changed = false;
    for (std::size_t k = 0; k < n; ++k) {
      if (formal_for[k] >= 0) continue;
      auto c = candidates(k);
      if (c.size() == 1) {
        formal_for[k] = static_cast<int>(c.front());
        formal_taken[c.front()] = true;
        changed = true;
      }
    }
  }

  std::optional<std::size_t> ambiguous;
  for (std::size_t k = 0; k < n; ++k) {
    if (formal_for[k] >= 0) continue;
    auto c = candidates(k);
    if (c.empty()) {
      throw PatchError(ErrorKind::Unresolvable,
                       "argument " + std::to_string(k + 1) + " (" +
                           render_type(call.actuals[k].type) + ") matches no remaining input of '" +
                           callee.name + "'");
    }
    if (!ambiguous) ambiguous = k;
  }
  if (ambiguous) {
    throw PatchError(ErrorKind::AmbiguousMapping,
                     "argument " + std::to_string(*ambiguous + 1) +
                         " fits more than one input of '" + callee.name + "'; name it");
  }

  Mapping m;
  m.formal_of_actual.reserve(n);
  for (std::size_t k = 0; k < n; ++k) {
    m.formal_of_actual.push_back(formals[static_cast<std::size_t>(formal_for[k])]->name);
  }
  return m;
}

std::pair<const ModuleDef*, Mapping> resolve_module(std::string_view name,
                                                    const CallSignature& call,
                                                    const PatchProgram& program) {
  const ModuleDef* m = program.find_module(name);
  if (!m) throw PatchError(ErrorKind::UnknownModule, "no module named '" + std::string(name) + "'");
  return {m, resolve_call(call, *m)};
}

}  // namespace patch
