#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "patch/model.hpp"

namespace patch {

// One validation or typing finding. `rule` is a stable id (tree-shape,
// label-unique, type-mismatch, ...).
struct Finding {
  std::string module;
  std::string step_id;
  std::string rule;
  std::string message;

  friend bool operator==(const Finding&, const Finding&) = default;
};

using VarTypes = std::map<std::string, PatchType>;

// Every variable of a module has one type for the whole module: its declared
// type, or the type of its first binding in execution order. Interpreter and
// code generators share this table so that a binding coerces the same way in
// every back end.
struct ModuleTypes {
  VarTypes vars;
  std::vector<Finding> findings;
};

ModuleTypes infer_types(const ModuleDef& m, const PatchProgram* program);

// Static type of an expression. Returns nullopt when the expression is
// ill-typed (reason in *why) or refers to a variable with no known type
// (*why left empty).
std::optional<PatchType> expr_type(const Expr& e, const VarTypes& vars, std::string* why = nullptr);

// Type of the slot an lvalue designates.
std::optional<PatchType> lvalue_type(const Expr& target, const VarTypes& vars,
                                     std::string* why = nullptr);

}  // namespace patch
