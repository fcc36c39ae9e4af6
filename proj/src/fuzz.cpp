#include "patch/fuzz.hpp"

#include <cmath>

#include "patch/literal.hpp"

namespace patch::fuzz {

namespace {

int pick(Rng& rng, int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); }

bool chance(Rng& rng, double p) { return std::bernoulli_distribution(p)(rng); }

template <class T>
const T& one_of(Rng& rng, const std::vector<T>& xs) {
  return xs[static_cast<std::size_t>(pick(rng, 0, static_cast<int>(xs.size()) - 1))];
}

Expr lit_int(std::int64_t v) { return Expr::lit(Value::integer(v)); }
Expr lit_real(double v) { return Expr::lit(Value::real(v)); }
Expr lit_str(std::string s) { return Expr::lit(Value::string(std::move(s))); }

struct Var {
  std::string name;
  PatchType type;
  bool writable = true;
};

using K = PatchType::Kind;

class Builder {
 public:
  Builder(Rng& rng, ModuleDef& m, const ProgramOptions& options, bool main)
      : rng_(rng), m_(m), options_(options), main_(main), budget_(options.max_steps) {}

  void declare(const std::string& name, PatchType t, bool writable = true) {
    scope_.push_back({name, std::move(t), writable});
  }

  // Module body: the given prefix steps, then a random sequence.
  void body(std::vector<std::string> prefix) {
    Step root;
    root.id = fresh_id();
    root.kind = StepKind::Module;
    root.payload = NoPayload{};
    const std::string root_id = root.id;
    m_.steps.push_back(root);
    auto rest = statements(0, false);
    prefix.insert(prefix.end(), rest.begin(), rest.end());
    link(prefix);
    step(root_id).children.push_back({ChildGroup::Body, std::nullopt, prefix.front()});
  }

  std::string assign(const std::string& var, Expr source, std::optional<PatchType> type = std::nullopt) {
    const bool copy = source.kind == Expr::Kind::Literal || source.kind == Expr::Kind::Var ||
                      source.kind == Expr::Kind::Index || source.kind == Expr::Kind::Field;
    return add(copy ? StepKind::Assign : StepKind::Transform,
               AssignPayload{Expr::var(var), std::move(type), std::move(source)});
  }

 private:
  std::string fresh_id() { return std::to_string(++ids_); }

  Step& step(const std::string& id) {
    for (auto& s : m_.steps) {
      if (s.id == id) return s;
    }
    throw std::logic_error("no step " + id);
  }

  std::string add(StepKind kind, StepPayload payload) {
    Step s;
    s.id = fresh_id();
    s.kind = kind;
    s.payload = std::move(payload);
    m_.steps.push_back(std::move(s));
    --budget_;
    return m_.steps.back().id;
  }

  void link(const std::vector<std::string>& ids) {
    for (std::size_t i = 0; i + 1 < ids.size(); ++i) step(ids[i]).next = ids[i + 1];
  }

  void child(const std::string& parent, ChildGroup g, const std::vector<std::string>& ids,
             std::optional<Value> label = std::nullopt) {
    link(ids);
    step(parent).children.push_back({g, std::move(label), ids.front()});
  }

  std::vector<const Var*> vars(K kind, bool writable_only = false, K element = K::Unknown) const {
    std::vector<const Var*> out;
    for (const auto& v : scope_) {
      if (v.type.kind() != kind || (writable_only && !v.writable)) continue;
      if (element != K::Unknown && v.type.element().kind() != element) continue;
      out.push_back(&v);
    }
    return out;
  }

  // ---------------------------------------------------------------------
  // Expressions

  Expr int_leaf() {
    auto ints = vars(K::Integer);
    auto lists = vars(K::List, false, K::Integer);
    switch (pick(rng_, 0, 9)) {
      case 0:
      case 1:
        return lit_int(pick(rng_, -3, 12));
      case 2:
        if (chance(rng_, 0.15)) return lit_int(chance(rng_, 0.5) ? INT64_MAX : INT64_MIN + 1);
        return lit_int(pick(rng_, 0, 3));
      case 3:
        if (!lists.empty()) return Expr::unary(Op::Size, Expr::var(one_of(rng_, lists)->name));
        [[fallthrough]];
      case 4:
        if (!lists.empty() && chance(rng_, 0.5)) {
          Expr pos = chance(rng_, 0.7) ? lit_int(pick(rng_, 1, 2)) : small_int_var();
          return Expr::index(Expr::var(one_of(rng_, lists)->name), pos);
        }
        [[fallthrough]];
      default:
        if (!ints.empty()) return Expr::var(one_of(rng_, ints)->name);
        return lit_int(pick(rng_, 0, 5));
    }
  }

  Expr small_int_var() {
    auto ints = vars(K::Integer);
    if (ints.empty()) return lit_int(1);
    return Expr::var(one_of(rng_, ints)->name);
  }

  Expr int_expr(int depth) {
    if (depth <= 0 || chance(rng_, 0.35)) return int_leaf();
    switch (pick(rng_, 0, 5)) {
      case 0: return Expr::binary(Op::Add, int_expr(depth - 1), int_expr(depth - 1));
      case 1: return Expr::binary(Op::Sub, int_expr(depth - 1), int_expr(depth - 1));
      case 2: return Expr::binary(Op::Mul, int_expr(depth - 1), int_leaf());
      case 3: return Expr::unary(Op::Neg, int_leaf());
      case 4: {
        auto sets = vars(K::Set);
        if (!sets.empty()) return Expr::unary(Op::Size, Expr::var(one_of(rng_, sets)->name));
        return int_leaf();
      }
      default: return Expr::binary(Op::Add, int_leaf(), lit_int(1));
    }
  }

  Expr real_leaf() {
    auto reals = vars(K::Real);
    if (!reals.empty() && chance(rng_, 0.55)) return Expr::var(one_of(rng_, reals)->name);
    static const std::vector<double> lits = {2.5, -0.75, 0.1, 3.0, 1e+300, 0.0};
    return lit_real(one_of(rng_, lits));
  }

  Expr real_expr(int depth) {
    if (depth <= 0 || chance(rng_, 0.3)) return real_leaf();
    switch (pick(rng_, 0, 6)) {
      case 0: return Expr::binary(Op::Add, real_expr(depth - 1), int_expr(depth - 1));
      case 1: return Expr::binary(Op::Sub, int_expr(depth - 1), real_expr(depth - 1));
      case 2: return Expr::binary(Op::Mul, real_expr(depth - 1), real_leaf());
      case 3: return Expr::binary(Op::Div, int_expr(depth - 1), int_leaf());
      case 4: return Expr::binary(Op::Div, real_expr(depth - 1), real_leaf());
      case 5: return Expr::binary(Op::Pow, real_leaf(), lit_int(pick(rng_, -1, 3)));
      default: return Expr::unary(Op::Neg, real_leaf());
    }
  }

  Expr string_expr() {
    auto strs = vars(K::String);
    if (!strs.empty() && chance(rng_, 0.6)) return Expr::var(one_of(rng_, strs)->name);
    static const std::vector<std::string> lits = {"a", "b", "Pea", "", "x y", "q\"t"};
    return lit_str(one_of(rng_, lits));
  }

  Expr set_literal() {
    std::vector<Value> items;
    for (int i = pick(rng_, 0, 3); i > 0; --i) items.push_back(Value::integer(pick(rng_, 0, 6)));
    return Expr::lit(Value::set(std::move(items)));
  }

  Expr set_expr(int depth) {
    auto sets = vars(K::Set);
    if (sets.empty() || depth <= 0 || chance(rng_, 0.3)) {
      return sets.empty() || chance(rng_, 0.3) ? set_literal() : Expr::var(one_of(rng_, sets)->name);
    }
    static const std::vector<Op> ops = {Op::Union, Op::Inter, Op::Diff};
    return Expr::binary(one_of(rng_, ops), Expr::var(one_of(rng_, sets)->name), set_literal());
  }

  Expr list_expr() {
    auto lists = vars(K::List, false, K::Integer);
    if (!lists.empty() && chance(rng_, 0.75)) return Expr::var(one_of(rng_, lists)->name);
    std::vector<Value> items;
    for (int i = pick(rng_, 0, 4); i > 0; --i) items.push_back(Value::integer(pick(rng_, -5, 9)));
    return Expr::lit(Value::list(std::move(items)));
  }

  Expr bool_expr(int depth) {
    static const std::vector<Op> order = {Op::Lt, Op::Gt, Op::Le, Op::Ge, Op::Eq};
    auto bools = vars(K::Boolean);
    if (depth <= 0 || chance(rng_, 0.2)) {
      if (!bools.empty() && chance(rng_, 0.7)) return Expr::var(one_of(rng_, bools)->name);
      return Expr::lit(Value::boolean(chance(rng_, 0.5)));
    }
    switch (pick(rng_, 0, 8)) {
      case 0:
      case 1: return Expr::binary(one_of(rng_, order), int_expr(depth - 1), int_expr(depth - 1));
      case 2: return Expr::binary(one_of(rng_, order), real_expr(depth - 1), int_leaf());
      case 3: return Expr::binary(one_of(rng_, order), string_expr(), string_expr());
      case 4: return Expr::unary(Op::Not, bool_expr(depth - 1));
      case 5: return Expr::binary(chance(rng_, 0.5) ? Op::And : Op::Or, bool_expr(depth - 1), bool_expr(depth - 1));
      case 6: {
        auto sets = vars(K::Set);
        if (!sets.empty()) return Expr::binary(Op::In, int_leaf(), Expr::var(one_of(rng_, sets)->name));
        return Expr::binary(Op::Eq, int_leaf(), int_leaf());
      }
      case 7: return Expr::binary(Op::Eq, list_expr(), list_expr());
      default: return Expr::binary(Op::Eq, Expr::unary(Op::Size, list_expr()), lit_int(0));
    }
  }

  Expr any_expr(int depth) {
    switch (pick(rng_, 0, 7)) {
      case 0:
      case 1: return int_expr(depth);
      case 2: return real_expr(depth);
      case 3: return bool_expr(depth);
      case 4: return string_expr();
      case 5: return set_expr(depth);
      case 6: return list_expr();
      default:
        // Cross products produce sets of pairs.
        return Expr::binary(Op::Cross, set_expr(0),
                            Expr::lit(Value::set({Value::string("a"), Value::string("b")})));
    }
  }

  // ---------------------------------------------------------------------
  // Statements

  std::vector<std::string> statements(int depth, bool inside) {
    std::vector<std::string> ids;
    const int n = pick(rng_, 1, depth == 0 ? 5 : 3);
    for (int i = 0; i < n && (budget_ > 0 || ids.empty()); ++i) {
      auto more = statement(depth);
      ids.insert(ids.end(), more.begin(), more.end());
    }
    if (inside && chance(rng_, 0.12)) {
      ids.push_back(add(StepKind::Exit, NoPayload{}));
    } else if (chance(rng_, 0.03)) {
      ids.push_back(add(StepKind::Stop, NoPayload{}));
    }
    return ids;
  }

  std::vector<std::string> statement(int depth) {
    const bool nest = depth < options_.max_depth && budget_ > 3;
    const int roll = pick(rng_, 0, nest ? 19 : 9);
    switch (roll) {
      case 0:
      case 1: return {assign_step()};
      case 2: return {element_write()};
      case 3: return {swap_step()};
      case 4: return {read_step()};
      case 5:
      case 6: return {add(StepKind::Display, DisplayPayload{any_expr(2)})};
      case 7: return {set_update()};
      case 8: return {main_ ? call_step() : assign_step()};
      case 9: return {assign_step()};
      case 10:
      case 11: return {bypass(depth)};
      case 12: return {either_or(depth)};
      case 13: return {labeled(depth)};
      case 14:
      case 15: return {counter_loop(depth)};
      case 16: return conditional_loop(depth);
      case 17:
      case 18: return {sentinel_loop(depth)};
      default: return {assign_step()};
    }
  }

  std::string assign_step() {
    std::vector<const Var*> targets;
    for (const auto& v : scope_) {
      if (v.writable) targets.push_back(&v);
    }
    const Var* v = one_of(rng_, targets);
    switch (v->type.kind()) {
      case K::Integer:
        return assign(v->name, chance(rng_, 0.2) ? real_expr(2) : int_expr(2));
      case K::Real: return assign(v->name, chance(rng_, 0.3) ? int_expr(1) : real_expr(2));
      case K::Boolean: return assign(v->name, bool_expr(2));
      case K::String: return assign(v->name, string_expr());
      case K::Set: return assign(v->name, set_expr(1));
      default: return assign(v->name, list_expr());
    }
  }

  std::string element_write() {
    auto lists = vars(K::List, true, K::Integer);
    if (lists.empty()) return assign_step();
    Expr target = Expr::index(Expr::var(one_of(rng_, lists)->name),
                              chance(rng_, 0.7) ? lit_int(pick(rng_, 1, 3)) : int_leaf());
    Expr source = int_expr(2);
    const bool copy = source.kind == Expr::Kind::Literal || source.kind == Expr::Kind::Var ||
                      source.kind == Expr::Kind::Index;
    return add(copy ? StepKind::Assign : StepKind::Transform,
               AssignPayload{std::move(target), std::nullopt, std::move(source)});
  }

  std::string swap_step() {
    auto lists = vars(K::List, true, K::Integer);
    if (lists.empty()) return assign_step();
    return add(StepKind::Transform, SwapPayload{Expr::var(one_of(rng_, lists)->name),
                                                lit_int(pick(rng_, 1, 2)), lit_int(pick(rng_, 1, 3))});
  }

  std::string read_step() {
    std::vector<const Var*> targets;
    for (const auto& v : scope_) {
      if (v.writable && v.type.is_scalar()) targets.push_back(&v);
    }
    if (targets.empty()) return assign_step();
    return add(StepKind::Read,
               ReadPayload{Expr::var(one_of(rng_, targets)->name), std::nullopt, Binding::Console});
  }

  std::string set_update() {
    auto sets = vars(K::Set, true);
    if (sets.empty()) return assign_step();
    const std::string name = one_of(rng_, sets)->name;
    return assign(name, Expr::binary(Op::Union, Expr::var(name), set_literal()));
  }

  std::string call_step() {
    CallPayload c;
    c.module = chance(rng_, 0.5) ? "Helper" : "HELPER";
    c.actuals.push_back({"a", int_expr(1)});
    c.actuals.push_back({"b", real_expr(1)});
    if (chance(rng_, 0.5)) std::swap(c.actuals[0], c.actuals[1]);
    auto ints = vars(K::Integer, true);
    auto reals = vars(K::Real, true);
    const Var* target = chance(rng_, 0.3) && !reals.empty() ? one_of(rng_, reals) : one_of(rng_, ints);
    c.results.push_back({"c", Expr::var(target->name)});
    return add(StepKind::Call, std::move(c));
  }

  std::vector<std::string> nested(int depth) {
    auto ids = statements(depth + 1, true);
    return ids;
  }

  std::string bypass(int depth) {
    const std::string id = add(StepKind::ByPass, ConditionPayload{bool_expr(2)});
    child(id, ChildGroup::Body, nested(depth));
    return id;
  }

  std::string either_or(int depth) {
    const std::string id = add(StepKind::EitherOr, ConditionPayload{bool_expr(2)});
    child(id, ChildGroup::Then, nested(depth));
    child(id, ChildGroup::Else, nested(depth));
    return id;
  }

  std::string labeled(int depth) {
    const int which = pick(rng_, 0, 2);
    std::string id;
    std::vector<Value> labels;
    if (which == 0) {
      id = add(StepKind::Labeled, LabeledPayload{int_leaf()});
      labels = {Value::integer(0), Value::integer(1), Value::integer(2), Value::integer(5)};
    } else if (which == 1) {
      id = add(StepKind::Labeled, LabeledPayload{string_expr()});
      labels = {Value::string("a"), Value::string("b"), Value::string("Pea")};
    } else {
      id = add(StepKind::Labeled, LabeledPayload{real_leaf()});
      labels = {Value::integer(0), Value::real(2.5), Value::integer(3)};
    }
    std::shuffle(labels.begin(), labels.end(), rng_);
    const int arms = pick(rng_, 1, 3);
    for (int i = 0; i < arms; ++i) child(id, ChildGroup::Case, nested(depth), labels[static_cast<std::size_t>(i)]);
    if (chance(rng_, 0.6)) child(id, ChildGroup::Default, nested(depth));
    return id;
  }

  std::string counter_loop(int depth) {
    const std::string var = "i" + std::to_string(++loops_);
    Expr start = lit_int(pick(rng_, -1, 3));
    Expr end = chance(rng_, 0.4) && !vars(K::List, false, K::Integer).empty()
                   ? Expr::unary(Op::Size, Expr::var(vars(K::List, false, K::Integer).front()->name))
                   : lit_int(pick(rng_, -1, 5));
    const std::string id = add(StepKind::CounterLoop, CounterPayload{var, std::move(start), std::move(end)});
    scope_.push_back({var, PatchType::integer(), false});
    child(id, ChildGroup::Body, nested(depth));
    scope_.pop_back();
    return id;
  }

  std::vector<std::string> conditional_loop(int depth) {
    const std::string var = "w" + std::to_string(++loops_);
    const std::string init = assign(var, lit_int(0), PatchType::integer());
    const std::string id =
        add(StepKind::ConditionalLoop,
            ConditionPayload{Expr::binary(Op::Lt, Expr::var(var), lit_int(pick(rng_, 1, 4)))});
    scope_.push_back({var, PatchType::integer(), false});
    std::vector<std::string> body = {assign(var, Expr::binary(Op::Add, Expr::var(var), lit_int(1)))};
    auto rest = nested(depth);
    body.insert(body.end(), rest.begin(), rest.end());
    child(id, ChildGroup::Body, body);
    scope_.pop_back();
    return {init, id};
  }

  std::string sentinel_loop(int depth) {
    auto lists = vars(K::List, false, K::Integer);
    if (lists.empty()) return bypass(depth);
    const std::string var = "e" + std::to_string(++loops_);
    SentinelPayload p{var, Expr::var(one_of(rng_, lists)->name), std::nullopt};
    if (chance(rng_, 0.5)) p.marker = chance(rng_, 0.8) ? lit_int(pick(rng_, -1, 9)) : lit_real(2.0);
    const std::string id = add(StepKind::SentinelLoop, std::move(p));
    scope_.push_back({var, PatchType::integer(), false});
    child(id, ChildGroup::Body, nested(depth));
    scope_.pop_back();
    return id;
  }

  Rng& rng_;
  ModuleDef& m_;
  ProgramOptions options_;
  bool main_;
  int budget_;
  int ids_ = 0;
  int loops_ = 0;
  std::vector<Var> scope_;
};

DataObjectDecl decl(std::string name, PatchType t, Binding b = Binding::Caller) {
  return {std::move(name), std::move(t), b};
}

std::string random_text(Rng& rng) {
  static const std::vector<std::string> pieces = {"a", "b", "Z", " ", "\"", "\\", "7", "\xc3\xa9", "x", "\t"};
  std::string s;
  for (int i = pick(rng, 0, 6); i > 0; --i) s += one_of(rng, pieces);
  return s;
}

}  // namespace

Value random_value(const PatchType& t, Rng& rng, std::size_t max_items) {
  auto items = [&](const PatchType& elem) {
    std::vector<Value> out;
    for (int i = pick(rng, 0, static_cast<int>(max_items)); i > 0; --i) {
      out.push_back(random_value(elem, rng, max_items / 2 + 1));
    }
    return out;
  };
  switch (t.kind()) {
    case K::Unknown:
    case K::Integer: return Value::integer(pick(rng, -20, 40));
    case K::Real: {
      const double x = std::uniform_real_distribution<double>(-50, 50)(rng);
      return Value::real(chance(rng, 0.5) ? std::round(x * 100) / 100 : x);
    }
    case K::Boolean: return Value::boolean(chance(rng, 0.5));
    case K::String: return Value::string(random_text(rng));
    case K::List: return Value::list(items(t.element()));
    case K::Set: return Value::set(items(t.element()));
    case K::Tuple: {
      std::vector<Value> vs;
      for (const auto& f : t.field_types()) vs.push_back(random_value(f, rng, max_items));
      return Value::tuple(t.field_names(), std::move(vs));
    }
  }
  return Value::integer(0);
}

PatchType random_type(Rng& rng, int depth) {
  const int roll = pick(rng, 0, depth > 0 ? 6 : 3);
  switch (roll) {
    case 0: return PatchType::integer();
    case 1: return PatchType::real();
    case 2: return PatchType::boolean();
    case 3: return PatchType::string();
    case 4: return PatchType::list(random_type(rng, depth - 1));
    case 5: return PatchType::set(random_type(rng, depth - 1));
    default: {
      std::vector<std::string> names;
      std::vector<PatchType> types;
      for (int i = pick(rng, 1, 3); i > 0; --i) {
        names.push_back("f" + std::to_string(names.size() + 1));
        types.push_back(random_type(rng, depth - 1));
      }
      return PatchType::tuple(std::move(names), std::move(types));
    }
  }
}

PatchProgram random_program(Rng& rng, const ProgramOptions& options) {
  PatchProgram p;
  p.entry = "Main";

  ModuleDef helper;
  helper.name = "Helper";
  helper.inputs = {decl("a", PatchType::integer()), decl("b", PatchType::real())};
  helper.outputs = {decl("c", PatchType::integer())};
  {
    ProgramOptions o = options;
    o.max_steps = options.max_steps / 3;
    o.max_depth = 1;
    Builder b(rng, helper, o, false);
    b.declare("a", PatchType::integer());
    b.declare("b", PatchType::real());
    b.declare("c", PatchType::integer());
    b.declare("d", PatchType::real());
    Builder* bp = &b;
    b.body({bp->assign("d", Expr::var("b"), PatchType::real()),
            bp->assign("c", Expr::binary(Op::Mul, Expr::var("a"), lit_int(2)))});
  }

  ModuleDef m;
  m.name = "Main";
  m.inputs = {decl("n", PatchType::integer()), decl("r", PatchType::real()),
              decl("xs", PatchType::list(PatchType::integer())), decl("flag", PatchType::boolean())};
  m.outputs = {decl("total", PatchType::integer()), decl("avg", PatchType::real()),
               decl("ys", PatchType::list(PatchType::integer())),
               decl("msg", PatchType::string(), Binding::Console)};
  {
    Builder b(rng, m, options, true);
    for (const auto& d : m.inputs) b.declare(d.name, d.type);
    for (const auto& d : m.outputs) b.declare(d.name, d.type);
    std::vector<std::pair<std::string, PatchType>> locals = {
        {"k", PatchType::integer()}, {"t", PatchType::real()},
        {"s", PatchType::string()},  {"ok", PatchType::boolean()},
        {"ws", PatchType::list(PatchType::integer())}, {"seen", PatchType::set(PatchType::integer())}};
    std::vector<std::string> init;
    for (const auto& [name, t] : locals) {
      init.push_back(b.assign(name, Expr::lit(default_value(t)), t));
      b.declare(name, t);
    }
    b.body(init);
  }
  p.modules.push_back(std::move(m));
  p.modules.push_back(std::move(helper));
  return p;
}

std::vector<InputSet> random_inputs(const PatchProgram& program, Rng& rng, std::size_t count,
                                    std::size_t console_lines) {
  const ModuleDef* m = program.entry_module();
  if (!m) return std::vector<InputSet>(count);
  return random_inputs(*m, rng, count, console_lines);
}

std::vector<InputSet> random_inputs(const ModuleDef& module, Rng& rng, std::size_t count,
                                    std::size_t console_lines) {
  static const std::vector<std::string> lines = {"3", "-2", "17", "2.5", "\"hi\"", "\"a\"", "TRUE",
                                                 "oops", "[1, 2]", "0"};
  std::vector<InputSet> out;
  for (std::size_t i = 0; i < count; ++i) {
    InputSet in;
    for (const auto& d : module.inputs) {
      if (d.binding == Binding::Caller) in.values.emplace_back(d.name, random_value(d.type, rng));
    }
    for (std::size_t k = 0; k < console_lines; ++k) in.console.push_back(one_of(rng, lines));
    out.push_back(std::move(in));
  }
  return out;
}

}  // namespace patch::fuzz
