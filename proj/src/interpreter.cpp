#include "patch/interpreter.hpp"

#include <unordered_map>

#include "patch/error.hpp"
#include "patch/identifier.hpp"
#include "patch/literal.hpp"
#include "patch/resolver.hpp"
#include "patch/typing.hpp"

namespace patch {

std::string ScriptedConsole::read_line() {
  if (input_.empty()) throw PatchError(ErrorKind::ReadFailed, "console input exhausted");
  std::string line = std::move(input_.front());
  input_.pop_front();
  return line;
}

std::optional<Value> InMemoryRepository::load(const std::string& module, const std::string& name) {
  auto it = values_.find({module, name});
  if (it == values_.end()) return std::nullopt;
  return it->second;
}

void InMemoryRepository::store(const std::string& module, const std::string& name, const Value& v) {
  values_[{module, name}] = v;
}

namespace {

Value eval(const Expr& e, const std::map<std::string, Value>& vars,
           const std::function<void(const Value&, const Value&, Op, bool)>& on_compare) {
  switch (e.kind) {
    case Expr::Kind::Literal:
      return e.literal;
    case Expr::Kind::Var: {
      auto it = vars.find(e.name);
      if (it == vars.end()) {
        throw PatchError(ErrorKind::UnboundVariable, "'" + e.name + "' has no value");
      }
      return it->second;
    }
    case Expr::Kind::Index: {
      Value c = eval(e.args[0], vars, on_compare);
      return index(c, eval(e.args[1], vars, on_compare));
    }
    case Expr::Kind::Field:
      return field(eval(e.args[0], vars, on_compare), e.name);
    case Expr::Kind::Unary:
      return apply_unary(e.op, eval(e.args[0], vars, on_compare));
    case Expr::Kind::Binary: {
      Value a = eval(e.args[0], vars, on_compare);
      if (e.op == Op::And || e.op == Op::Or) {
        if (!a.is_bool()) throw PatchError(ErrorKind::TypeMismatch, "logical operand is not boolean");
        if (a.as_bool() == (e.op == Op::Or)) return a;
        Value b = eval(e.args[1], vars, on_compare);
        if (!b.is_bool()) throw PatchError(ErrorKind::TypeMismatch, "logical operand is not boolean");
        return b;
      }
      Value b = eval(e.args[1], vars, on_compare);
      Value r = apply_binary(e.op, a, b);
      if (on_compare && is_comparison(e.op)) on_compare(a, b, e.op, r.as_bool());
      return r;
    }
  }
  throw PatchError(ErrorKind::InvalidProgram, "malformed expression");
}

struct Halt {};
struct Cancelled {
  std::string step_id;
  std::string module;
};

enum class Outcome { Normal, Exited, Stopped };

struct ModuleInfo {
  std::unordered_map<std::string, const Step*> steps;
  VarTypes types;
  std::unordered_map<std::string, std::size_t> position;  // pre-order
};

struct Frame {
  const ModuleDef* module = nullptr;
  const ModuleInfo* info = nullptr;
  std::map<std::string, Value> vars;
  int depth = 0;
};

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

class Machine {
 public:
  Machine(const PatchProgram& program, Console& console, Repository& repo, const RunOptions& options)
      : program_(program), console_(console), repo_(repo), options_(options) {}

  RunResult run(const ModuleDef& m, const std::vector<Argument>& args) {
    const ModuleInfo& mi = info(m);
    if (options_.preview_until) {
      auto it = mi.position.find(*options_.preview_until);
      if (it == mi.position.end()) {
        throw PatchError(ErrorKind::InvalidProgram,
                         "no step '" + *options_.preview_until + "' in module " + m.name);
      }
      preview_limit_ = it->second;
    }
    const auto bound = bind_arguments(m, args);
    entry_.module = &m;
    entry_.info = &mi;
    try {
      Outcome o = invoke(entry_, bound);
      result_.stopped = o == Outcome::Stopped;
    } catch (const Halt&) {
      result_.status = RunResult::Status::Halted;
    } catch (const Cancelled& c) {
      result_.status = RunResult::Status::Cancelled;
      TraceEvent e;
      e.kind = EventKind::Stopped;
      e.module = c.module;
      e.step_id = c.step_id;
      emit(std::move(e));
    }
    if (result_.status != RunResult::Status::Finished) {
      for (const auto& d : m.outputs) {
        if (d.binding != Binding::Caller) continue;
        auto it = entry_.vars.find(d.name);
        if (it != entry_.vars.end()) result_.outputs.emplace_back(d.name, it->second);
      }
    }
    for (const auto& [name, v] : entry_.vars) result_.variables.emplace_back(name, v);
    return std::move(result_);
  }

 private:
  const ModuleInfo& info(const ModuleDef& m) {
    auto it = infos_.find(&m);
    if (it != infos_.end()) return it->second;
    ModuleInfo mi;
    for (const auto& s : m.steps) mi.steps.emplace(s.id, &s);
    mi.types = infer_types(m, &program_).vars;
    std::size_t k = 0;
    for (const Step* s : execution_order(m)) mi.position.emplace(s->id, k++);
    return infos_.emplace(&m, std::move(mi)).first->second;
  }

  std::map<std::string, Value> bind_arguments(const ModuleDef& m, const std::vector<Argument>& args) {
    CallSignature sig;
    for (const auto& a : args) {
      std::optional<std::string> name;
      if (a.name) name = normalize_identifier(*a.name);
      sig.actuals.push_back({name, type_of(a.value)});
    }
    Mapping mapping = resolve_call(sig, m);
    std::map<std::string, Value> bound;
    for (std::size_t k = 0; k < args.size(); ++k) {
      bound.emplace(mapping.formal_of_actual[k], args[k].value);
    }
    return bound;
  }

  void emit(TraceEvent e) {
    e.seq = ++seq_;
    if (options_.on_event) options_.on_event(e);
    if (options_.keep_trace) result_.trace.push_back(std::move(e));
  }

  TraceEvent event(const Frame& f, const Step& s, EventKind kind) {
    TraceEvent e;
    e.kind = kind;
    e.module = f.module->name;
    e.step_id = s.id;
    return e;
  }

  void snapshot(const Frame& f, TraceEvent& e) {
    for (const auto& w : options_.watch) {
      if (!is_valid_identifier(w)) continue;
      auto it = f.vars.find(normalize_identifier(w));
      if (it != f.vars.end()) e.snapshot.emplace_back(it->first, it->second);
    }
  }

  Value evaluate(Frame& f, const Step& s, const Expr& e) {
    return eval(e, f.vars, [&](const Value& a, const Value& b, Op op, bool r) {
      TraceEvent ev = event(f, s, EventKind::Compare);
      ev.lhs = a;
      ev.rhs = b;
      ev.op = std::string(op_symbol(op));
      ev.result = r;
      emit(std::move(ev));
    });
  }

  void mutation(Frame& f, const Step& s, EventKind kind, const Expr& target,
                std::optional<Value> old) {
    TraceEvent e = event(f, s, kind);
    e.var = target.root_var();
    e.target = print_expr(target);
    e.old_value = std::move(old);
    e.value = f.vars.at(e.var);
    emit(std::move(e));
  }

  PatchType slot_type(const Frame& f, const Expr& target, const Value& v) {
    if (auto t = lvalue_type(target, f.info->types)) return *t;
    return type_of(v);
  }

  // Writes v (already coerced) into the slot designated by target.
  void store(Frame& f, const Step& s, const Expr& target, Value v) {
    if (target.kind == Expr::Kind::Var) {
      f.vars[target.name] = std::move(v);
      return;
    }
    Value* slot = locate(f, s, target);
    *slot = std::move(v);
  }

  Value* locate(Frame& f, const Step& s, const Expr& target) {
    switch (target.kind) {
      case Expr::Kind::Var: {
        auto it = f.vars.find(target.name);
        if (it == f.vars.end()) {
          throw PatchError(ErrorKind::UnboundVariable, "'" + target.name + "' has no value");
        }
        return &it->second;
      }
      case Expr::Kind::Index: {
        Value pos = evaluate(f, s, target.args[1]);
        Value* c = locate(f, s, target.args[0]);
        index(*c, pos);  // bounds and kind checks
        std::vector<Value>& items =
            c->is_list() ? c->as_list().items : c->as_tuple().items;
        return &items[static_cast<std::size_t>(pos.as_int() - 1)];
      }
      case Expr::Kind::Field: {
        Value* t = locate(f, s, target.args[0]);
        field(*t, target.name);
        auto& tv = t->as_tuple();
        for (std::size_t k = 0; k < tv.names.size(); ++k) {
          if (tv.names[k] == target.name) return &tv.items[k];
        }
        break;
      }
      default:
        break;
    }
    throw PatchError(ErrorKind::InvalidProgram, "'" + print_expr(target) + "' cannot be assigned");
  }

  std::optional<Value> current(const Frame& f, const std::string& var) {
    auto it = f.vars.find(var);
    if (it == f.vars.end()) return std::nullopt;
    return it->second;
  }

  void assign(Frame& f, const Step& s, EventKind kind, const Expr& target, const Value& v) {
    const std::string& root = target.root_var();
    auto old = current(f, root);
    store(f, s, target, assign_coerce(v, slot_type(f, target, v)));
    mutation(f, s, kind, target, std::move(old));
  }

  void tick(Frame& f, const Step& s, std::int64_t iteration) {
    if (++iterations_ > options_.iteration_budget) {
      throw PatchError(ErrorKind::BudgetExceeded,
                       "more than " + std::to_string(options_.iteration_budget) + " loop iterations",
                       s.id);
    }
    TraceEvent e = event(f, s, EventKind::LoopIter);
    e.iteration = iteration;
    snapshot(f, e);
    emit(std::move(e));
  }

  Outcome invoke(Frame& f, const std::map<std::string, Value>& bound) {
    const ModuleDef& m = *f.module;
    const Step* root = m.root();
    if (!root) throw PatchError(ErrorKind::InvalidProgram, "module " + m.name + " has no root step");
    const std::string key = m.key();

    emit(event(f, *root, EventKind::Enter));
    try {
      for (const auto& d : m.inputs) {
        Value v;
        EventKind kind = EventKind::Assign;
        switch (d.binding) {
          case Binding::Caller: {
            auto it = bound.find(d.name);
            if (it == bound.end()) {
              throw PatchError(ErrorKind::Unresolvable, "input '" + d.name + "' was not supplied");
            }
            v = assign_coerce(it->second, d.type);
            break;
          }
          case Binding::Console:
            v = read_console(d.type);
            kind = EventKind::Read;
            break;
          case Binding::Repository: {
            auto loaded = repo_.load(key, d.name);
            if (!loaded) {
              throw PatchError(ErrorKind::ReadFailed, "repository holds no '" + d.name + "'");
            }
            v = assign_coerce(*loaded, d.type);
            kind = EventKind::Read;
            break;
          }
        }
        f.vars[d.name] = v;
        mutation(f, *root, kind, Expr::var(d.name), std::nullopt);
      }
      for (const auto& d : m.outputs) {
        if (!f.vars.count(d.name)) f.vars[d.name] = default_value(d.type);
      }
    } catch (PatchError& e) {
      if (e.step_id().empty()) e.set_step_id(root->id);
      throw;
    }

    Outcome o = run_children(f, *root);

    for (const auto& d : m.outputs) {
      const Value& v = f.vars.at(d.name);
      switch (d.binding) {
        case Binding::Caller:
          if (f.depth == 0) result_.outputs.emplace_back(d.name, v);
          break;
        case Binding::Console: {
          display(f, *root, v);
          break;
        }
        case Binding::Repository:
          repo_.store(key, d.name, v);
          break;
      }
    }
    if (o != Outcome::Stopped) {
      TraceEvent e = event(f, *root, EventKind::ExitStep);
      snapshot(f, e);
      emit(std::move(e));
    }
    return o;
  }

  Value read_console(const PatchType& t) {
    std::string line = console_.read_line();
    try {
      return read_value(line, t);
    } catch (const PatchError& e) {
      throw PatchError(ErrorKind::ReadFailed, std::string("console input: ") + e.what());
    }
  }

  void display(Frame& f, const Step& s, const Value& v) {
    console_.display(render_value(v));
    result_.displays.push_back(v);
    TraceEvent e = event(f, s, EventKind::Display);
    e.value = v;
    emit(std::move(e));
  }

  Outcome run_sequence(Frame& f, const std::string& head) {
    const Step* s = find(f, head);
    while (s) {
      Outcome o = exec(f, *s);
      if (o != Outcome::Normal) return o;
      s = s->next ? find(f, *s->next) : nullptr;
    }
    return Outcome::Normal;
  }

  const Step* find(const Frame& f, const std::string& id) {
    auto it = f.info->steps.find(id);
    if (it == f.info->steps.end()) {
      throw PatchError(ErrorKind::InvalidProgram, "edge to unknown step '" + id + "'");
    }
    return it->second;
  }

  Outcome run_children(Frame& f, const Step& s, ChildGroup group = ChildGroup::Body) {
    for (const auto& c : s.children) {
      if (c.group != group) continue;
      Outcome o = run_sequence(f, c.step);
      if (o != Outcome::Normal) return o;
    }
    return Outcome::Normal;
  }

  // Loops and branches absorb an EXIT raised directly inside them.
  static Outcome absorb(Outcome o) { return o == Outcome::Exited ? Outcome::Normal : o; }

  Outcome exec(Frame& f, const Step& s) {
    if (options_.cancel && options_.cancel->load()) throw Cancelled{s.id, f.module->name};
    if (preview_limit_ && f.depth == 0) {
      auto it = f.info->position.find(s.id);
      if (it != f.info->position.end() && it->second > *preview_limit_) throw Halt{};
    }
    emit(event(f, s, EventKind::Enter));
    Outcome o;
    try {
      o = body(f, s);
    } catch (PatchError& e) {
      if (e.step_id().empty()) e.set_step_id(s.id);
      throw;
    }
    if (o != Outcome::Stopped) {
      TraceEvent e = event(f, s, EventKind::ExitStep);
      snapshot(f, e);
      emit(std::move(e));
    }
    return o;
  }

  Outcome body(Frame& f, const Step& s) {
    switch (s.kind) {
      case StepKind::Exit:
        emit(event(f, s, EventKind::Exited));
        return Outcome::Exited;
      case StepKind::Stop:
        emit(event(f, s, EventKind::Stopped));
        return Outcome::Stopped;
      case StepKind::Module:
        throw PatchError(ErrorKind::InvalidProgram, "nested module step");
      default:
        break;
    }
    return std::visit(
        Overloaded{
            [&](const NoPayload&) -> Outcome {
              throw PatchError(ErrorKind::InvalidProgram, "step has no payload");
            },
            [&](const AssignPayload& p) {
              Value v = evaluate(f, s, p.source);
              assign(f, s, s.kind == StepKind::Transform ? EventKind::Transform : EventKind::Assign,
                     p.target, v);
              return Outcome::Normal;
            },
            [&](const SwapPayload& p) { return swap(f, s, p); },
            [&](const ReadPayload& p) {
              Value v;
              const PatchType t = lvalue_type(p.target, f.info->types).value_or(PatchType::string());
              if (p.source == Binding::Repository) {
                auto loaded = repo_.load(f.module->key(), p.target.root_var());
                if (!loaded) {
                  throw PatchError(ErrorKind::ReadFailed,
                                   "repository holds no '" + p.target.root_var() + "'");
                }
                v = *loaded;
              } else {
                v = read_console(t);
              }
              assign(f, s, EventKind::Read, p.target, v);
              return Outcome::Normal;
            },
            [&](const DisplayPayload& p) {
              display(f, s, evaluate(f, s, p.value));
              return Outcome::Normal;
            },
            [&](const ConditionPayload& p) { return condition(f, s, p); },
            [&](const LabeledPayload& p) { return labeled(f, s, p); },
            [&](const CounterPayload& p) { return counter(f, s, p); },
            [&](const SentinelPayload& p) { return sentinel(f, s, p); },
            [&](const CallPayload& p) { return call(f, s, p); },
        },
        s.payload);
  }

  bool truth(Frame& f, const Step& s, const Expr& e) {
    Value v = evaluate(f, s, e);
    if (!v.is_bool()) throw PatchError(ErrorKind::TypeMismatch, "condition is not boolean");
    return v.as_bool();
  }

  Outcome condition(Frame& f, const Step& s, const ConditionPayload& p) {
    switch (s.kind) {
      case StepKind::ByPass:
        return truth(f, s, p.condition) ? absorb(run_children(f, s)) : Outcome::Normal;
      case StepKind::EitherOr:
        return absorb(run_children(f, s, truth(f, s, p.condition) ? ChildGroup::Then : ChildGroup::Else));
      case StepKind::ConditionalLoop: {
        std::int64_t k = 0;
        while (truth(f, s, p.condition)) {
          tick(f, s, ++k);
          Outcome o = run_children(f, s);
          if (o == Outcome::Exited) break;
          if (o == Outcome::Stopped) return o;
        }
        return Outcome::Normal;
      }
      default:
        throw PatchError(ErrorKind::InvalidProgram, "condition payload on a non-conditional step");
    }
  }

  Outcome labeled(Frame& f, const Step& s, const LabeledPayload& p) {
    Value v = evaluate(f, s, p.scrutinee);
    const PatchType vt = type_of(v);
    const std::string* arm = nullptr;
    for (const auto& c : s.children) {
      if (c.group == ChildGroup::Case && c.label && compatible(type_of(*c.label), vt) &&
          values_equal(*c.label, v)) {
        arm = &c.step;
        break;
      }
    }
    if (!arm) {
      for (const auto& c : s.children) {
        if (c.group == ChildGroup::Default) arm = &c.step;
      }
    }
    if (!arm) return Outcome::Normal;
    return absorb(run_sequence(f, *arm));
  }

  Outcome counter(Frame& f, const Step& s, const CounterPayload& p) {
    Value a = evaluate(f, s, p.start);
    Value b = evaluate(f, s, p.end);
    if (!a.is_int() || !b.is_int()) {
      throw PatchError(ErrorKind::TypeMismatch, "counter bounds must be integers");
    }
    const std::int64_t from = a.as_int();
    const std::int64_t to = b.as_int();
    const std::int64_t step = from <= to ? 1 : -1;
    const Expr var = Expr::var(p.variable);
    std::int64_t k = 0;
    for (std::int64_t i = from;; i += step) {
      tick(f, s, ++k);
      auto old = current(f, p.variable);
      f.vars[p.variable] = Value::integer(i);
      mutation(f, s, EventKind::Assign, var, std::move(old));
      Outcome o = run_children(f, s);
      if (o == Outcome::Exited) break;
      if (o == Outcome::Stopped) return o;
      if (i == to) break;
    }
    return Outcome::Normal;
  }

  Outcome sentinel(Frame& f, const Step& s, const SentinelPayload& p) {
    Value c = evaluate(f, s, p.collection);
    if (!c.is_list()) throw PatchError(ErrorKind::TypeMismatch, "sentinel loops walk a list");
    std::optional<Value> marker;
    if (p.marker) marker = evaluate(f, s, *p.marker);
    const Expr var = Expr::var(p.variable);
    const PatchType t = lvalue_type(var, f.info->types).value_or(PatchType::unknown());
    std::int64_t k = 0;
    for (const auto& item : c.as_list().items) {
      if (marker) {
        bool hit = values_equal(item, *marker);
        TraceEvent e = event(f, s, EventKind::Compare);
        e.lhs = item;
        e.rhs = *marker;
        e.op = "=";
        e.result = hit;
        emit(std::move(e));
        if (hit) break;
      }
      tick(f, s, ++k);
      auto old = current(f, p.variable);
      f.vars[p.variable] = t.kind() == PatchType::Kind::Unknown ? item : assign_coerce(item, t);
      mutation(f, s, EventKind::Assign, var, std::move(old));
      Outcome o = run_children(f, s);
      if (o == Outcome::Exited) break;
      if (o == Outcome::Stopped) return o;
    }
    return Outcome::Normal;
  }

  Outcome swap(Frame& f, const Step& s, const SwapPayload& p) {
    Value a = evaluate(f, s, p.first);
    Value b = evaluate(f, s, p.second);
    const std::string& root = p.container.root_var();
    auto old = current(f, root);
    Value* c = locate(f, s, p.container);
    if (!c->is_list()) throw PatchError(ErrorKind::TypeMismatch, "swap needs a list");
    index(*c, a);
    index(*c, b);
    auto& items = c->as_list().items;
    std::swap(items[static_cast<std::size_t>(a.as_int() - 1)],
              items[static_cast<std::size_t>(b.as_int() - 1)]);
    TraceEvent e = event(f, s, EventKind::Swap);
    e.var = root;
    e.target = print_expr(p.container);
    e.i = a.as_int();
    e.j = b.as_int();
    e.old_value = std::move(old);
    e.value = f.vars.at(root);
    emit(std::move(e));
    return Outcome::Normal;
  }

  Outcome call(Frame& f, const Step& s, const CallPayload& p) {
    CallSignature sig;
    std::vector<Value> values;
    for (const auto& a : p.actuals) {
      Value v = evaluate(f, s, a.value);
      auto t = expr_type(a.value, f.info->types);
      sig.actuals.push_back({a.name, t ? *t : type_of(v)});
      values.push_back(std::move(v));
    }
    auto [callee, mapping] = resolve_module(p.module, sig, program_);
    if (f.depth + 1 >= options_.max_depth) {
      throw PatchError(ErrorKind::CallDepthExceeded,
                       "more than " + std::to_string(options_.max_depth) + " nested calls");
    }
    std::map<std::string, Value> bound;
    for (std::size_t k = 0; k < values.size(); ++k) {
      bound.emplace(mapping.formal_of_actual[k], std::move(values[k]));
    }
    Frame inner;
    inner.module = callee;
    inner.info = &info(*callee);
    inner.depth = f.depth + 1;
    invoke(inner, bound);
    for (const auto& r : p.results) {
      const std::string key = normalize_identifier(r.output);
      auto it = inner.vars.find(key);
      bool declared = false;
      for (const auto& d : callee->outputs) declared = declared || d.name == key;
      if (!declared || it == inner.vars.end()) {
        throw PatchError(ErrorKind::Unresolvable, "module " + callee->name + " has no output '" +
                                                      r.output + "'");
      }
      assign(f, s, EventKind::Assign, r.target, it->second);
    }
    return Outcome::Normal;
  }

  const PatchProgram& program_;
  Console& console_;
  Repository& repo_;
  const RunOptions& options_;
  std::map<const ModuleDef*, ModuleInfo> infos_;
  Frame entry_;
  RunResult result_;
  std::uint64_t seq_ = 0;
  std::uint64_t iterations_ = 0;
  std::optional<std::size_t> preview_limit_;
};

}  // namespace

Value eval_expr(const Expr& e, const std::map<std::string, Value>& vars,
                const std::function<void(const Value&, const Value&, Op, bool)>& on_compare) {
  return eval(e, vars, on_compare);
}

RunResult run_module(const PatchProgram& program, const std::string& module,
                     const std::vector<Argument>& args, Console& console, Repository& repo,
                     const RunOptions& options) {
  const ModuleDef* m = module.empty() ? program.entry_module() : program.find_module(module);
  if (!m) {
    throw PatchError(ErrorKind::UnknownModule,
                     "no module named '" + (module.empty() ? program.entry : module) + "'");
  }
  return Machine(program, console, repo, options).run(*m, args);
}

RunResult run_module(const PatchProgram& program, const std::string& module,
                     const std::vector<Argument>& args, const RunOptions& options) {
  ScriptedConsole console;
  InMemoryRepository repo;
  return run_module(program, module, args, console, repo, options);
}

std::vector<Argument> parse_arguments(const ModuleDef& m,
                                      const std::vector<std::pair<std::string, std::string>>& raw) {
  std::vector<Argument> out;
  for (const auto& [name, text] : raw) {
    Argument a;
    const PatchType* declared = nullptr;
    if (!name.empty()) {
      a.name = normalize_identifier(name);
      for (const auto& d : m.inputs) {
        if (d.name == *a.name) declared = &d.type;
      }
    }
    a.value = declared ? read_value(text, *declared) : parse_literal(text);
    out.push_back(std::move(a));
  }
  return out;
}

}  // namespace patch
