#include "patch/typing.hpp"

#include "patch/error.hpp"
#include "patch/literal.hpp"
#include "patch/resolver.hpp"

namespace patch {

namespace {

std::optional<PatchType> fail(std::string* why, std::string msg) {
  if (why) *why = std::move(msg);
  return std::nullopt;
}

}  // namespace

std::optional<PatchType> expr_type(const Expr& e, const VarTypes& vars, std::string* why) {
  using K = PatchType::Kind;
  if (why) why->clear();
  switch (e.kind) {
    case Expr::Kind::Literal:
      return type_of(e.literal);
    case Expr::Kind::Var: {
      auto it = vars.find(e.name);
      if (it == vars.end()) return std::nullopt;
      return it->second;
    }
    case Expr::Kind::Index: {
      auto c = expr_type(e.args[0], vars, why);
      if (!c) return std::nullopt;
      auto i = expr_type(e.args[1], vars, why);
      if (!i) return std::nullopt;
      if (i->kind() != K::Integer) return fail(why, "index must be an integer");
      if (c->kind() == K::List) return c->element();
      if (c->kind() == K::Tuple) {
        const Expr& pos = e.args[1];
        if (pos.kind != Expr::Kind::Literal || !pos.literal.is_int()) {
          return fail(why, "tuple members are indexed by a constant position");
        }
        const auto k = pos.literal.as_int();
        if (k < 1 || static_cast<std::size_t>(k) > c->field_types().size()) {
          return fail(why, "tuple index " + std::to_string(k) + " out of range");
        }
        return c->field_types()[static_cast<std::size_t>(k - 1)];
      }
      if (c->kind() == K::Set) return fail(why, "set members can only be tested, not accessed");
      return fail(why, "value of type " + render_type(*c) + " is not indexable");
    }
    case Expr::Kind::Field: {
      auto t = expr_type(e.args[0], vars, why);
      if (!t) return std::nullopt;
      if (t->kind() != K::Tuple) return fail(why, "field access on " + render_type(*t));
      auto k = t->field_index(e.name);
      if (!k) return fail(why, "no field '" + e.name + "' in " + render_type(*t));
      return t->field_types()[*k];
    }
    case Expr::Kind::Unary: {
      auto a = expr_type(e.args[0], vars, why);
      if (!a) return std::nullopt;
      if (a->kind() == K::Unknown) return a;
      return unary_result_type(e.op, *a, why);
    }
    case Expr::Kind::Binary: {
      auto a = expr_type(e.args[0], vars, why);
      if (!a) return std::nullopt;
      auto b = expr_type(e.args[1], vars, why);
      if (!b) return std::nullopt;
      if (a->kind() == K::Unknown || b->kind() == K::Unknown) {
        if (is_comparison(e.op) || e.op == Op::And || e.op == Op::Or || e.op == Op::In) {
          return PatchType::boolean();
        }
        return PatchType::unknown();
      }
      return binary_result_type(e.op, *a, *b, why);
    }
  }
  return std::nullopt;
}

std::optional<PatchType> lvalue_type(const Expr& target, const VarTypes& vars, std::string* why) {
  if (!target.is_lvalue()) return fail(why, "not an assignable target");
  return expr_type(target, vars, why);
}

namespace {

class Typer {
 public:
  Typer(const ModuleDef& m, const PatchProgram* program) : m_(m), program_(program) {}

  ModuleTypes run() {
    for (const auto* list : {&m_.inputs, &m_.outputs}) {
      for (const auto& d : *list) out_.vars.emplace(d.name, d.type);
    }
    for (const Step* s : execution_order(m_)) step(*s);
    for (auto& [name, type] : out_.vars) type = resolve_unknown(type);
    return std::move(out_);
  }

 private:
  void report(const Step& s, std::string rule, std::string msg) {
    out_.findings.push_back({m_.name, s.id, std::move(rule), std::move(msg)});
  }

  std::optional<PatchType> type(const Step& s, const Expr& e) {
    std::string why;
    auto t = expr_type(e, out_.vars, &why);
    if (!t && !why.empty()) report(s, "type-mismatch", print_expr(e) + ": " + why);
    return t;
  }

  void expect(const Step& s, const Expr& e, PatchType::Kind kind, const char* what) {
    auto t = type(s, e);
    if (t && t->kind() != kind && t->kind() != PatchType::Kind::Unknown) {
      report(s, "type-mismatch", std::string(what) + " '" + print_expr(e) + "' has type " +
                                     render_type(*t));
    }
  }

  // Records a binding of `source` into variable `name`.
  void bind_var(const Step& s, const std::string& name, const std::optional<PatchType>& declared,
                const std::optional<PatchType>& source) {
    auto it = out_.vars.find(name);
    if (declared) {
      if (it != out_.vars.end() && !unify(it->second, *declared)) {
        report(s, "type-conflict", "'" + name + "' already has type " + render_type(it->second));
      } else if (it == out_.vars.end()) {
        it = out_.vars.emplace(name, *declared).first;
      } else {
        it->second = *unify(it->second, *declared);
      }
    }
    if (!source) return;
    if (it == out_.vars.end()) {
      out_.vars.emplace(name, *source);
      return;
    }
    if (!compatible(*source, it->second)) {
      report(s, "type-mismatch", "cannot store " + render_type(*source) + " in '" + name +
                                     "' of type " + render_type(it->second));
      return;
    }
    if (auto u = unify(it->second, *source)) it->second = *u;
  }

  void bind_target(const Step& s, const Expr& target, const std::optional<PatchType>& declared,
                   const std::optional<PatchType>& source) {
    if (!target.is_lvalue()) return;  // reported by validate
    if (target.kind == Expr::Kind::Var) {
      bind_var(s, target.name, declared, source);
      return;
    }
    // An element write into an empty-list variable fixes its element type.
    if (target.kind == Expr::Kind::Index && target.args[0].kind == Expr::Kind::Var && source) {
      auto it = out_.vars.find(target.args[0].name);
      if (it != out_.vars.end() && it->second.kind() == PatchType::Kind::List &&
          it->second.element().kind() == PatchType::Kind::Unknown) {
        it->second = PatchType::list(*source);
      }
    }
    std::string why;
    auto slot = lvalue_type(target, out_.vars, &why);
    if (!slot) {
      if (!why.empty()) report(s, "type-mismatch", print_expr(target) + ": " + why);
      return;
    }
    if (source && !compatible(*source, *slot)) {
      report(s, "type-mismatch", "cannot store " + render_type(*source) + " in " +
                                     print_expr(target) + " of type " + render_type(*slot));
    }
  }

  void step(const Step& s) {
    std::visit([&](const auto& p) { payload(s, p); }, s.payload);
  }

  void payload(const Step&, const NoPayload&) {}

  void payload(const Step& s, const AssignPayload& p) {
    auto src = type(s, p.source);
    bind_target(s, p.target, p.type, src);
  }

  void payload(const Step& s, const SwapPayload& p) {
    std::string why;
    auto c = lvalue_type(p.container, out_.vars, &why);
    if (!c) {
      if (!why.empty()) report(s, "type-mismatch", why);
    } else if (c->kind() != PatchType::Kind::List) {
      report(s, "type-mismatch", "swap needs a list, got " + render_type(*c));
    }
    expect(s, p.first, PatchType::Kind::Integer, "swap position");
    expect(s, p.second, PatchType::Kind::Integer, "swap position");
  }

  void payload(const Step& s, const ReadPayload& p) {
    if (p.target.kind == Expr::Kind::Var && !p.type && !out_.vars.count(p.target.name)) {
      report(s, "type-mismatch", "read into '" + p.target.name + "' needs a declared type");
      return;
    }
    bind_target(s, p.target, p.type, std::nullopt);
  }

  void payload(const Step& s, const DisplayPayload& p) { type(s, p.value); }

  void payload(const Step& s, const ConditionPayload& p) {
    expect(s, p.condition, PatchType::Kind::Boolean, "condition");
  }

  void payload(const Step& s, const LabeledPayload& p) {
    auto t = type(s, p.scrutinee);
    if (!t) return;
    for (const auto& c : s.children) {
      if (c.label && !compatible(type_of(*c.label), *t)) {
        report(s, "type-mismatch", "label " + render_value(*c.label) +
                                       " cannot match a value of type " + render_type(*t));
      }
    }
  }

  void payload(const Step& s, const CounterPayload& p) {
    expect(s, p.start, PatchType::Kind::Integer, "counter start");
    expect(s, p.end, PatchType::Kind::Integer, "counter end");
    bind_var(s, p.variable, std::nullopt, PatchType::integer());
  }

  void payload(const Step& s, const SentinelPayload& p) {
    auto c = type(s, p.collection);
    std::optional<PatchType> elem;
    if (c) {
      if (c->kind() != PatchType::Kind::List) {
        report(s, "type-mismatch", "sentinel loops walk a list, got " + render_type(*c));
      } else {
        elem = c->element();
      }
    }
    if (p.marker) {
      auto m = type(s, *p.marker);
      if (m && elem && !compatible(*m, *elem)) {
        report(s, "type-mismatch", "marker type " + render_type(*m) +
                                       " does not match element type " + render_type(*elem));
      }
    }
    bind_var(s, p.variable, std::nullopt, elem);
  }

  void payload(const Step& s, const CallPayload& p) {
    CallSignature sig;
    bool all_known = true;
    for (const auto& a : p.actuals) {
      auto t = type(s, a.value);
      if (!t) all_known = false;
      sig.actuals.push_back({a.name, t.value_or(PatchType::unknown())});
    }
    const ModuleDef* callee = program_ ? program_->find_module(p.module) : nullptr;
    if (!callee) {
      report(s, "unknown-module", "no module named '" + p.module + "'");
      return;
    }
    if (all_known) {
      try {
        resolve_call(sig, *callee);
      } catch (const PatchError& e) {
        report(s, std::string(to_string(e.kind())), e.what());
      }
    } else if (sig.actuals.size() != caller_inputs(*callee).size()) {
      report(s, "arity-mismatch", "argument count does not match '" + callee->name + "'");
    }
    for (const auto& r : p.results) {
      const DataObjectDecl* out = nullptr;
      for (const auto& d : callee->outputs) {
        if (d.name == r.output && d.binding == Binding::Caller) out = &d;
      }
      if (!out) {
        report(s, "unknown-output",
               "'" + callee->name + "' returns no caller-bound output '" + r.output + "'");
        continue;
      }
      bind_target(s, r.target, std::nullopt, out->type);
    }
  }

  const ModuleDef& m_;
  const PatchProgram* program_;
  ModuleTypes out_;
};

}  // namespace

ModuleTypes infer_types(const ModuleDef& m, const PatchProgram* program) {
  return Typer(m, program).run();
}

}  // namespace patch
