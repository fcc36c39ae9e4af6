#pragma once

#include <vector>

#include "patch/model.hpp"
#include "patch/typing.hpp"

namespace patch {

struct ValidationReport {
  std::vector<Finding> findings;

  bool ok() const { return findings.empty(); }
  bool has_rule(std::string_view rule) const;
  friend bool operator==(const ValidationReport&, const ValidationReport&) = default;
};

// Checks the drawing rules (every module body is a tree of solid and dashed
// edges with at most one incoming edge per step), child-group arities per
// step kind, label uniqueness, EXIT placement, read-only counters,
// declare-before-use, call resolvability and static types. Pure; findings
// are returned, never thrown.
ValidationReport validate(const PatchProgram& program);

// Module-level checks only (program-level rules such as duplicate module
// names and the entry module are skipped). `program` resolves calls.
ValidationReport validate_module(const ModuleDef& m, const PatchProgram* program);

}  // namespace patch
