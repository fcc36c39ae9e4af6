#include "emit_common.hpp"

#include <functional>

#include "patch/identifier.hpp"
#include "patch/literal.hpp"
#include "patch/resolver.hpp"

namespace patch::emitter {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

// Every expression held by a step payload.
std::vector<const Expr*> payload_exprs(const StepPayload& payload) {
  std::vector<const Expr*> out;
  std::visit(Overloaded{
                 [](const NoPayload&) {},
                 [&](const AssignPayload& p) { out = {&p.target, &p.source}; },
                 [&](const SwapPayload& p) { out = {&p.container, &p.first, &p.second}; },
                 [&](const ReadPayload& p) { out = {&p.target}; },
                 [&](const DisplayPayload& p) { out = {&p.value}; },
                 [&](const ConditionPayload& p) { out = {&p.condition}; },
                 [&](const LabeledPayload& p) { out = {&p.scrutinee}; },
                 [&](const CounterPayload& p) { out = {&p.start, &p.end}; },
                 [&](const SentinelPayload& p) {
                   out = {&p.collection};
                   if (p.marker) out.push_back(&*p.marker);
                 },
                 [&](const CallPayload& p) {
                   for (const auto& a : p.actuals) out.push_back(&a.value);
                   for (const auto& r : p.results) out.push_back(&r.target);
                 },
             },
             payload);
  return out;
}

}  // namespace

void unsupported(const std::string& what) {
  throw PatchError(ErrorKind::UnsupportedConstruct, what);
}

std::string module_symbol(const ModuleDef& m) { return m.key(); }

std::vector<const ModuleDef*> reachable_modules(const PatchProgram& program, const ModuleDef& entry) {
  std::vector<const ModuleDef*> out;
  std::function<void(const ModuleDef&)> visit = [&](const ModuleDef& m) {
    for (const ModuleDef* seen : out) {
      if (seen == &m) return;
    }
    out.push_back(&m);
    for (const Step* s : execution_order(m)) {
      if (const auto* call = std::get_if<CallPayload>(&s->payload)) {
        if (const ModuleDef* callee = program.find_module(call->module)) visit(*callee);
      }
    }
  };
  visit(entry);
  return out;
}

void TupleTable::collect(const PatchType& t) {
  using K = PatchType::Kind;
  if (t.kind() == K::List || t.kind() == K::Set) {
    collect(t.element());
    return;
  }
  if (t.kind() != K::Tuple) return;
  for (const auto& f : t.field_types()) collect(f);
  for (const auto& [known, name] : tuples_) {
    if (known == t) return;
  }
  tuples_.emplace_back(t, "Tuple" + std::to_string(tuples_.size() + 1));
}

const std::string& TupleTable::name(const PatchType& t) const {
  for (const auto& [known, name] : tuples_) {
    if (known == t) return name;
  }
  unsupported("tuple type " + render_type(t) + " was not collected");
}

ModuleFacts::ModuleFacts(const PatchProgram& program, const ModuleDef& m,
                         const std::set<std::string>& reserved)
    : program_(program), m_(m) {
  ModuleTypes types = infer_types(m, &program);
  if (!types.findings.empty()) {
    const auto& f = types.findings.front();
    unsupported("module " + m.name + " does not type-check (step " + f.step_id + ": " + f.message + ")");
  }
  vars_ = std::move(types.vars);
  used_ = reserved;
  for (const auto& [name, type] : vars_) {
    std::string spelled = name;
    while (used_.count(spelled)) spelled += "_";
    used_.insert(spelled);
    locals_.emplace(name, spelled);
  }
}

const std::string& ModuleFacts::local(const std::string& var) const {
  auto it = locals_.find(var);
  if (it == locals_.end()) unsupported("variable '" + var + "' has no static type");
  return it->second;
}

std::string ModuleFacts::temp(const std::string& stem) {
  std::string name;
  do {
    name = stem + std::to_string(++counter_) + "_";
  } while (used_.count(name));
  used_.insert(name);
  return name;
}

PatchType ModuleFacts::raw_type(const Expr& e) const {
  std::string why;
  auto t = expr_type(e, vars_, &why);
  if (!t) unsupported("cannot type '" + print_expr(e) + "'" + (why.empty() ? "" : ": " + why));
  return *t;
}

PatchType ModuleFacts::type(const Expr& e) const { return resolve_unknown(raw_type(e)); }

PatchType ModuleFacts::slot(const Expr& target) const {
  std::string why;
  auto t = lvalue_type(target, vars_, &why);
  if (!t) unsupported("cannot type target '" + print_expr(target) + "'");
  return resolve_unknown(*t);
}

unsigned ModuleFacts::fault_kinds(const Expr& e) const {
  auto bit = [](ErrorKind k) { return 1u << static_cast<unsigned>(k); };
  unsigned kinds = 0;
  for (const auto& a : e.args) kinds |= fault_kinds(a);
  switch (e.kind) {
    case Expr::Kind::Literal:
    case Expr::Kind::Var:
    case Expr::Kind::Field:
      return kinds;
    case Expr::Kind::Index:
      return kinds | bit(ErrorKind::IndexOutOfRange);
    case Expr::Kind::Unary:
      if (e.op == Op::Neg && type(e.args[0]).kind() == PatchType::Kind::Integer) {
        kinds |= bit(ErrorKind::ArithOverflow);
      }
      return kinds;
    case Expr::Kind::Binary:
      // Operands are always finite, so only these can produce NaN.
      switch (e.op) {
        case Op::Add:
        case Op::Sub:
        case Op::Mul:
          return kinds | bit(ErrorKind::ArithOverflow);
        case Op::Div:
          return kinds | bit(ErrorKind::DivisionByZero) | bit(ErrorKind::ArithOverflow);
        case Op::Pow:
          return kinds | bit(ErrorKind::ArithOverflow) | bit(ErrorKind::DomainError);
        default:
          return kinds;
      }
  }
  return ~0u;
}

bool ModuleFacts::order_matters(const Expr& a, const Expr& b) const {
  const unsigned x = fault_kinds(a);
  const unsigned y = fault_kinds(b);
  if (x == 0 || y == 0) return false;
  const unsigned all = x | y;
  return (all & (all - 1)) != 0;
}

std::pair<const ModuleDef*, Mapping> ModuleFacts::resolve(const CallPayload& p) const {
  CallSignature sig;
  for (const auto& a : p.actuals) sig.actuals.push_back({a.name, raw_type(a.value)});
  try {
    return resolve_module(p.module, sig, program_);
  } catch (const PatchError& e) {
    unsupported(std::string("call to ") + p.module + ": " + e.what());
  }
}

void ModuleFacts::collect_tuples(TupleTable& table) const {
  for (const auto& [name, t] : vars_) table.collect(resolve_unknown(t));
  for (const auto& d : m_.inputs) table.collect(d.type);
  for (const auto& d : m_.outputs) table.collect(d.type);
  std::function<void(const Expr&)> walk = [&](const Expr& e) {
    for (const auto& a : e.args) walk(a);
    if (auto t = expr_type(e, vars_)) table.collect(resolve_unknown(*t));
  };
  for (const Step* s : execution_order(m_)) {
    for (const Expr* e : payload_exprs(s->payload)) walk(*e);
    for (const auto& c : s->children) {
      if (c.label) table.collect(type_of(*c.label));
    }
  }
}

bool holds_direct_exit(const ModuleDef& m, const Step& s) {
  for (const auto& c : s.children) {
    for (const Step* x : sequence(m, c.step)) {
      if (x->kind == StepKind::Exit) return true;
    }
  }
  return false;
}

}  // namespace patch::emitter
