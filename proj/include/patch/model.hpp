#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "patch/expr.hpp"
#include "patch/value.hpp"

namespace patch {

enum class StepKind {
  Module,  // root of a module body
  Assign,
  Transform,
  Read,
  Display,
  ByPass,
  EitherOr,
  Labeled,
  CounterLoop,
  ConditionalLoop,
  SentinelLoop,
  Call,
  Exit,
  Stop,
};

std::string_view to_string(StepKind kind);
std::optional<StepKind> step_kind_from_string(std::string_view text);

bool is_loop(StepKind kind);
bool is_branch(StepKind kind);
// Kinds allowed to own child groups (dashed edges).
bool is_container(StepKind kind);

enum class Binding { Console, Repository, Caller };

std::string_view to_string(Binding b);
std::optional<Binding> binding_from_string(std::string_view text);

struct DataObjectDecl {
  std::string name;  // normalized
  PatchType type;
  Binding binding = Binding::Caller;

  friend bool operator==(const DataObjectDecl&, const DataObjectDecl&) = default;
};

// Payloads. Assign and Transform share AssignPayload; a Transform may instead
// carry a SwapPayload (exchange two elements of one list).
struct NoPayload {
  friend bool operator==(const NoPayload&, const NoPayload&) = default;
};

struct AssignPayload {
  Expr target;                      // lvalue
  std::optional<PatchType> type;    // declares the target's type on first binding
  Expr source;
  friend bool operator==(const AssignPayload&, const AssignPayload&) = default;
};

struct SwapPayload {
  Expr container;  // lvalue naming a list
  Expr first;
  Expr second;
  friend bool operator==(const SwapPayload&, const SwapPayload&) = default;
};

struct ReadPayload {
  Expr target;
  std::optional<PatchType> type;
  Binding source = Binding::Console;  // Console or Repository
  friend bool operator==(const ReadPayload&, const ReadPayload&) = default;
};

struct DisplayPayload {
  Expr value;
  friend bool operator==(const DisplayPayload&, const DisplayPayload&) = default;
};

// By-pass, either-or and conditional loop.
struct ConditionPayload {
  Expr condition;
  friend bool operator==(const ConditionPayload&, const ConditionPayload&) = default;
};

struct LabeledPayload {
  Expr scrutinee;
  friend bool operator==(const LabeledPayload&, const LabeledPayload&) = default;
};

struct CounterPayload {
  std::string variable;
  Expr start;
  Expr end;
  friend bool operator==(const CounterPayload&, const CounterPayload&) = default;
};

struct SentinelPayload {
  std::string variable;
  Expr collection;
  std::optional<Expr> marker;  // absent: visit every element
  friend bool operator==(const SentinelPayload&, const SentinelPayload&) = default;
};

struct CallActual {
  std::optional<std::string> name;  // normalized; absent for positional actuals
  Expr value;
  friend bool operator==(const CallActual&, const CallActual&) = default;
};

struct CallResult {
  std::string output;  // callee output name
  Expr target;         // caller lvalue
  friend bool operator==(const CallResult&, const CallResult&) = default;
};

struct CallPayload {
  std::string module;  // as written; resolved case-insensitively
  std::vector<CallActual> actuals;
  std::vector<CallResult> results;
  friend bool operator==(const CallPayload&, const CallPayload&) = default;
};

using StepPayload = std::variant<NoPayload, AssignPayload, SwapPayload, ReadPayload,
                                 DisplayPayload, ConditionPayload, LabeledPayload,
                                 CounterPayload, SentinelPayload, CallPayload>;

enum class ChildGroup { Body, Then, Else, Case, Default };

std::string_view to_string(ChildGroup g);
std::optional<ChildGroup> child_group_from_string(std::string_view text);

// A dashed edge: `step` heads a sequence that continues along solid `next`
// edges. Labeled branches tag each arm with its constant.
struct ChildLink {
  ChildGroup group = ChildGroup::Body;
  std::optional<Value> label;
  std::string step;
  friend bool operator==(const ChildLink&, const ChildLink&) = default;
};

struct Step {
  std::string id;
  StepKind kind = StepKind::Display;
  StepPayload payload;
  std::optional<std::string> next;  // solid edge
  std::vector<ChildLink> children;  // dashed edges

  friend bool operator==(const Step&, const Step&) = default;
};

// A module is the pair <D, S>: declared data objects plus a step tree rooted
// at a Module step. Steps are stored flat and linked by id so that malformed
// drawings (fan-in, cycles) remain representable for validation.
struct ModuleDef {
  std::string name;  // as written
  std::vector<DataObjectDecl> inputs;
  std::vector<DataObjectDecl> outputs;
  std::vector<Step> steps;

  std::string key() const;  // normalized name
  const Step* find(std::string_view id) const;
  // The unique Module-kind step, if any.
  const Step* root() const;

  // Structural: the order in which steps are stored does not matter.
  friend bool operator==(const ModuleDef& a, const ModuleDef& b);
};

struct PatchProgram {
  std::vector<ModuleDef> modules;
  std::string entry;  // module name

  const ModuleDef* find_module(std::string_view name) const;
  const ModuleDef* entry_module() const { return find_module(entry); }

  friend bool operator==(const PatchProgram&, const PatchProgram&) = default;
};

// Steps reachable from the root in execution order: a step, then each of
// its child groups in order, then its solid successor. Stops at revisits so
// it is safe on malformed graphs.
std::vector<const Step*> execution_order(const ModuleDef& m);

// Steps in a sequence starting at `head` following solid edges.
std::vector<const Step*> sequence(const ModuleDef& m, std::string_view head);

}  // namespace patch
