// Shared fixtures for the unit tests and the acceptance runner.
#pragma once

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <random>
#include <string>
#include <vector>

#include "patch/document.hpp"
#include "patch/expr.hpp"
#include "patch/fuzz.hpp"
#include "patch/interpreter.hpp"
#include "patch/literal.hpp"
#include "patch/model.hpp"
#include "patch/resolver.hpp"

namespace patch::test {

inline std::string source_path(const std::string& rel) { return std::string(PATCH_SOURCE_DIR) + "/" + rel; }

inline PatchDocument bubble_sort() { return load_document(source_path("samples/bubble_sort.patch.json")); }

inline DataObjectDecl decl(const std::string& name, const std::string& type, Binding b = Binding::Caller) {
  return {name, parse_type(type), b};
}

inline Step step(std::string id, StepKind kind, StepPayload payload, std::optional<std::string> next = {},
                 std::vector<ChildLink> children = {}) {
  Step s;
  s.id = std::move(id);
  s.kind = kind;
  s.payload = std::move(payload);
  s.next = std::move(next);
  s.children = std::move(children);
  return s;
}

inline Step root(std::string first) {
  return step("root", StepKind::Module, NoPayload{}, std::nullopt, {{ChildGroup::Body, std::nullopt, std::move(first)}});
}

inline ChildLink body(std::string id) { return {ChildGroup::Body, std::nullopt, std::move(id)}; }
inline ChildLink then_(std::string id) { return {ChildGroup::Then, std::nullopt, std::move(id)}; }
inline ChildLink else_(std::string id) { return {ChildGroup::Else, std::nullopt, std::move(id)}; }
inline ChildLink arm(const std::string& label, std::string id) {
  return {ChildGroup::Case, parse_literal(label), std::move(id)};
}

inline AssignPayload assign(const std::string& target, const std::string& source) {
  return {parse_expr(target), std::nullopt, parse_expr(source)};
}
inline AssignPayload assign(const std::string& target, const std::string& type, const std::string& source) {
  return {parse_expr(target), parse_type(type), parse_expr(source)};
}
inline DisplayPayload show(const std::string& e) { return {parse_expr(e)}; }
inline ConditionPayload cond(const std::string& e) { return {parse_expr(e)}; }
inline CounterPayload counter(const std::string& v, const std::string& from, const std::string& to) {
  return {v, parse_expr(from), parse_expr(to)};
}

inline PatchProgram single(ModuleDef m) {
  PatchProgram p;
  p.entry = m.name;
  p.modules.push_back(std::move(m));
  return p;
}

inline ModuleDef module(std::string name, std::vector<DataObjectDecl> in, std::vector<DataObjectDecl> out,
                        std::vector<Step> steps) {
  ModuleDef m;
  m.name = std::move(name);
  m.inputs = std::move(in);
  m.outputs = std::move(out);
  m.steps = std::move(steps);
  return m;
}

inline Value int_list(const std::vector<std::int64_t>& xs) {
  std::vector<Value> items;
  for (auto x : xs) items.push_back(Value::integer(x));
  return Value::list(std::move(items));
}

inline std::vector<std::int64_t> ints(const Value& list) {
  std::vector<std::int64_t> out;
  for (const auto& v : list.as_list().items) out.push_back(v.as_int());
  return out;
}

// Brute-force pair count.
inline std::size_t inversions(const std::vector<std::int64_t>& xs) {
  std::size_t n = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    for (std::size_t j = i + 1; j < xs.size(); ++j) n += xs[i] > xs[j] ? 1 : 0;
  }
  return n;
}

inline RunResult sort_run(const PatchProgram& p, const std::vector<std::int64_t>& xs, RunOptions opts = {}) {
  return run_module(p, "", {{std::string("list"), int_list(xs)}}, opts);
}

inline std::size_t count(const std::vector<TraceEvent>& trace, EventKind k) {
  return static_cast<std::size_t>(
      std::count_if(trace.begin(), trace.end(), [k](const TraceEvent& e) { return e.kind == k; }));
}


// Every bijection from actuals onto the callee's caller inputs that honours
// names and type compatibility.
inline std::vector<Mapping> all_bijections(const CallSignature& call, const ModuleDef& callee) {
  const auto formals = caller_inputs(callee);
  std::vector<Mapping> out;
  if (formals.size() != call.actuals.size()) return out;
  std::vector<std::size_t> perm(formals.size());
  std::iota(perm.begin(), perm.end(), 0);
  do {
    bool ok = true;
    for (std::size_t k = 0; k < perm.size() && ok; ++k) {
      const auto& a = call.actuals[k];
      const auto& f = *formals[perm[k]];
      ok = compatible(a.type, f.type);
      if (a.name) {
        ok = ok && *a.name == f.name;
      } else {
        // an unnamed actual cannot take a formal some named actual claims
        for (const auto& b : call.actuals) ok = ok && !(b.name && *b.name == f.name);
      }
    }
    if (ok) {
      Mapping m;
      for (std::size_t k = 0; k < perm.size(); ++k) m.formal_of_actual.push_back(formals[perm[k]]->name);
      out.push_back(std::move(m));
    }
  } while (std::next_permutation(perm.begin(), perm.end()));
  return out;
}

struct SignatureCase {
  ModuleDef callee;
  CallSignature call;
};

// Callee with up to six caller inputs over a few scalar types, and a call
// whose actuals are a shuffled, partly named copy of them.
inline SignatureCase random_signature(std::mt19937_64& rng) {
  static const std::vector<std::string> types = {"integer", "real", "string", "boolean", "list(integer)"};
  SignatureCase c;
  c.callee.name = "Callee";
  const std::size_t n = 1 + rng() % 6;
  for (std::size_t i = 0; i < n; ++i) {
    c.callee.inputs.push_back(decl("p" + std::to_string(i), types[rng() % types.size()]));
  }
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::shuffle(order.begin(), order.end(), rng);
  for (std::size_t i : order) {
    ActualSpec a;
    a.type = c.callee.inputs[i].type;
    if (rng() % 2) a.name = c.callee.inputs[i].name;
    c.call.actuals.push_back(a);
  }
  return c;
}


// A random program wrapped with editor geometry and members the format does
// not define, which must survive a round trip untouched.
inline PatchDocument random_document(std::mt19937_64& rng) {
  PatchDocument doc;
  doc.program = fuzz::random_program(rng);
  if (rng() % 2) {
    Json layout = Json::object();
    for (const auto& m : doc.program.modules) {
      for (const auto& s : m.steps) layout[m.name][s.id] = {static_cast<int>(rng() % 40), static_cast<int>(rng() % 40)};
    }
    doc.layout = layout;
  }
  if (rng() % 2) doc.extra["color-theme"] = rng() % 2 ? "dark" : "light";
  if (rng() % 3 == 0) doc.module_extra[doc.program.modules.front().name] = Json{{"note", "scratch"}};
  if (rng() % 3 == 0) {
    const auto& m = doc.program.modules.front();
    doc.step_extra[{m.name, m.steps.back().id}] = Json{{"collapsed", true}};
  }
  return doc;
}

}  // namespace patch::test
