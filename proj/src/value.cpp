#include "patch/value.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "patch/error.hpp"
#include "patch/identifier.hpp"

namespace patch {

// ---------------------------------------------------------------------------
// PatchType

PatchType PatchType::list(PatchType element) {
  PatchType t(Kind::List);
  t.children_.push_back(std::move(element));
  return t;
}

PatchType PatchType::set(PatchType element) {
  PatchType t(Kind::Set);
  t.children_.push_back(std::move(element));
  return t;
}

PatchType PatchType::tuple(std::vector<std::string> names, std::vector<PatchType> types) {
  if (names.size() != types.size()) {
    throw PatchError(ErrorKind::TypeMismatch, "tuple type needs one name per field");
  }
  PatchType t(Kind::Tuple);
  for (auto& n : names) {
    n = normalize_identifier(n);
    if (std::count(t.names_.begin(), t.names_.end(), n) != 0) {
      throw PatchError(ErrorKind::TypeMismatch, "duplicate tuple field '" + n + "'");
    }
    t.names_.push_back(n);
  }
  t.children_ = std::move(types);
  return t;
}

bool PatchType::is_scalar() const {
  return kind_ == Kind::Integer || kind_ == Kind::Real || kind_ == Kind::Boolean ||
         kind_ == Kind::String;
}

bool PatchType::has_unknown() const {
  if (kind_ == Kind::Unknown) return true;
  return std::any_of(children_.begin(), children_.end(),
                     [](const PatchType& c) { return c.has_unknown(); });
}

const PatchType& PatchType::element() const {
  if (!is_collection()) {
    throw PatchError(ErrorKind::TypeMismatch, "element type of a non-collection");
  }
  return children_.front();
}

std::optional<std::size_t> PatchType::field_index(std::string_view normalized) const {
  for (std::size_t i = 0; i < names_.size(); ++i) {
    if (names_[i] == normalized) return i;
  }
  return std::nullopt;
}

bool operator==(const PatchType& a, const PatchType& b) {
  return a.kind_ == b.kind_ && a.names_ == b.names_ && a.children_ == b.children_;
}

std::optional<PatchType> unify(const PatchType& a, const PatchType& b) {
  using K = PatchType::Kind;
  if (a.kind() == K::Unknown) return b;
  if (b.kind() == K::Unknown) return a;
  if (a.kind() != b.kind()) return std::nullopt;
  switch (a.kind()) {
    case K::List:
    case K::Set: {
      auto e = unify(a.element(), b.element());
      if (!e) return std::nullopt;
      return a.kind() == K::List ? PatchType::list(*e) : PatchType::set(*e);
    }
    case K::Tuple: {
      if (a.field_names() != b.field_names()) return std::nullopt;
      std::vector<PatchType> fields;
      for (std::size_t i = 0; i < a.field_types().size(); ++i) {
        auto f = unify(a.field_types()[i], b.field_types()[i]);
        if (!f) return std::nullopt;
        fields.push_back(*f);
      }
      return PatchType::tuple(a.field_names(), std::move(fields));
    }
    default:
      return a;
  }
}

bool compatible(const PatchType& a, const PatchType& b) {
  if (a.is_numeric() && b.is_numeric()) return true;
  return unify(a, b).has_value();
}

PatchType resolve_unknown(const PatchType& t) {
  using K = PatchType::Kind;
  switch (t.kind()) {
    case K::Unknown: return PatchType::integer();
    case K::List: return PatchType::list(resolve_unknown(t.element()));
    case K::Set: return PatchType::set(resolve_unknown(t.element()));
    case K::Tuple: {
      std::vector<PatchType> fields;
      for (const auto& f : t.field_types()) fields.push_back(resolve_unknown(f));
      return PatchType::tuple(t.field_names(), std::move(fields));
    }
    default: return t;
  }
}

// ---------------------------------------------------------------------------
// Value construction

namespace {

// Shared element type of a homogeneous collection, widening integer/real
// mixes. Returns the type and whether widening is needed.
std::pair<PatchType, bool> element_type(const std::vector<Value>& items) {
  PatchType acc = PatchType::unknown();
  bool saw_int = false;
  bool saw_real = false;
  for (const auto& item : items) {
    PatchType t = type_of(item);
    saw_int = saw_int || t.kind() == PatchType::Kind::Integer;
    saw_real = saw_real || t.kind() == PatchType::Kind::Real;
    if (acc.is_numeric() && t.is_numeric()) {
      if (t.kind() == PatchType::Kind::Real) acc = t;
      continue;
    }
    auto u = unify(acc, t);
    if (!u) {
      throw PatchError(ErrorKind::TypeMismatch, "collection elements must share one type");
    }
    acc = *u;
  }
  return {acc, saw_int && saw_real};
}

}  // namespace

namespace {

std::vector<Value> homogenize(std::vector<Value> items) {
  auto [type, widen] = element_type(items);
  if (widen) {
    for (auto& item : items) {
      if (item.is_int()) item = Value::real(static_cast<double>(item.as_int()));
    }
  }
  return items;
}

}  // namespace

Value Value::list(std::vector<Value> items) {
  return Value(Storage(ListValue{homogenize(std::move(items))}));
}

Value Value::set(std::vector<Value> items) {
  items = homogenize(std::move(items));
  std::sort(items.begin(), items.end(),
            [](const Value& a, const Value& b) { return compare_values(a, b) < 0; });
  items.erase(std::unique(items.begin(), items.end(),
                          [](const Value& a, const Value& b) { return compare_values(a, b) == 0; }),
              items.end());
  return Value(Storage(SetValue{std::move(items)}));
}

Value Value::tuple(std::vector<std::string> names, std::vector<Value> items) {
  if (names.size() != items.size()) {
    throw PatchError(ErrorKind::TypeMismatch, "every tuple member must be named");
  }
  for (std::size_t i = 0; i < names.size(); ++i) {
    names[i] = normalize_identifier(names[i]);
    for (std::size_t j = 0; j < i; ++j) {
      if (names[j] == names[i]) {
        throw PatchError(ErrorKind::TypeMismatch, "duplicate tuple field '" + names[i] + "'");
      }
    }
  }
  return Value(Storage(TupleValue{std::move(names), std::move(items)}));
}

double Value::as_number() const {
  return is_int() ? static_cast<double>(as_int()) : as_real();
}

bool operator==(const Value& a, const Value& b) {
  if (a.storage_.index() != b.storage_.index()) return false;
  return std::visit(
      [&](const auto& x) -> bool {
        using T = std::decay_t<decltype(x)>;
        const auto& y = std::get<T>(b.storage_);
        if constexpr (std::is_same_v<T, ListValue> || std::is_same_v<T, SetValue>) {
          return x.items == y.items;
        } else if constexpr (std::is_same_v<T, TupleValue>) {
          return x.names == y.names && x.items == y.items;
        } else {
          return x == y;
        }
      },
      a.storage_);
}

// ---------------------------------------------------------------------------
// Ordering and equality

namespace {

int kind_rank(const Value& v) {
  if (v.is_numeric()) return 0;
  if (v.is_bool()) return 1;
  if (v.is_string()) return 2;
  if (v.is_list()) return 3;
  if (v.is_set()) return 4;
  return 5;
}

std::strong_ordering compare_sequences(const std::vector<Value>& a, const std::vector<Value>& b) {
  const std::size_t n = std::min(a.size(), b.size());
  for (std::size_t i = 0; i < n; ++i) {
    auto c = compare_values(a[i], b[i]);
    if (c != 0) return c;
  }
  return a.size() <=> b.size();
}

std::strong_ordering compare_doubles(double x, double y) {
  if (x < y) return std::strong_ordering::less;
  if (x > y) return std::strong_ordering::greater;
  return std::strong_ordering::equal;
}

}  // namespace

std::strong_ordering compare_values(const Value& a, const Value& b) {
  const int ra = kind_rank(a);
  const int rb = kind_rank(b);
  if (ra != rb) return ra <=> rb;
  if (a.is_numeric()) {
    if (a.is_int() && b.is_int()) return a.as_int() <=> b.as_int();
    return compare_doubles(a.as_number(), b.as_number());
  }
  if (a.is_bool()) return a.as_bool() <=> b.as_bool();
  if (a.is_string()) {
    int c = a.as_string().compare(b.as_string());
    return c <=> 0;
  }
  if (a.is_list()) return compare_sequences(a.as_list().items, b.as_list().items);
  if (a.is_set()) return compare_sequences(a.as_set().items, b.as_set().items);
  return compare_sequences(a.as_tuple().items, b.as_tuple().items);
}

bool values_equal(const Value& a, const Value& b) { return compare_values(a, b) == 0; }

// ---------------------------------------------------------------------------
// Typing

PatchType type_of(const Value& v) {
  if (v.is_int()) return PatchType::integer();
  if (v.is_real()) return PatchType::real();
  if (v.is_bool()) return PatchType::boolean();
  if (v.is_string()) return PatchType::string();
  if (v.is_list()) return PatchType::list(element_type(v.as_list().items).first);
  if (v.is_set()) return PatchType::set(element_type(v.as_set().items).first);
  const auto& t = v.as_tuple();
  std::vector<PatchType> fields;
  fields.reserve(t.items.size());
  for (const auto& item : t.items) fields.push_back(type_of(item));
  return PatchType::tuple(t.names, std::move(fields));
}

namespace {

std::int64_t truncate_to_int(double x) {
  // 2^63 is exactly representable; [-2^63, 2^63) is the int64 range.
  constexpr double kLimit = 9223372036854775808.0;
  const double t = std::trunc(x);
  if (!(t >= -kLimit && t < kLimit)) {
    throw PatchError(ErrorKind::ArithOverflow, "real value does not fit an integer");
  }
  return static_cast<std::int64_t>(t);
}

}  // namespace

Value assign_coerce(const Value& v, const PatchType& target) {
  using K = PatchType::Kind;
  if (v.is_numeric() && target.is_numeric()) {
    if (target.kind() == K::Integer) {
      return v.is_int() ? v : Value::integer(truncate_to_int(v.as_real()));
    }
    return v.is_real() ? v : Value::real(static_cast<double>(v.as_int()));
  }
  if (!compatible(type_of(v), target)) {
    throw PatchError(ErrorKind::IncompatibleAssignment,
                     "value cannot be stored in a slot of this type");
  }
  return v;
}

// ---------------------------------------------------------------------------
// Access

Value default_value(const PatchType& t) {
  using K = PatchType::Kind;
  switch (t.kind()) {
    case K::Unknown:
    case K::Integer: return Value::integer(0);
    case K::Real: return Value::real(0.0);
    case K::Boolean: return Value::boolean(false);
    case K::String: return Value::string("");
    case K::List: return Value::list({});
    case K::Set: return Value::set({});
    case K::Tuple: {
      std::vector<Value> items;
      for (const auto& f : t.field_types()) items.push_back(default_value(f));
      return Value::tuple(t.field_names(), std::move(items));
    }
  }
  return Value::integer(0);
}

Value index(const Value& collection, const Value& position) {
  if (!position.is_int()) {
    throw PatchError(ErrorKind::TypeMismatch, "index must be an integer");
  }
  const std::vector<Value>* items = nullptr;
  if (collection.is_list()) {
    items = &collection.as_list().items;
  } else if (collection.is_tuple()) {
    items = &collection.as_tuple().items;
  } else if (collection.is_set()) {
    throw PatchError(ErrorKind::NotIndexable, "set members can only be tested, not accessed");
  } else {
    throw PatchError(ErrorKind::NotIndexable, "value is not a list or tuple");
  }
  const std::int64_t i = position.as_int();
  if (i < 1 || static_cast<std::uint64_t>(i) > items->size()) {
    throw PatchError(ErrorKind::IndexOutOfRange,
                     "index " + std::to_string(i) + " outside 1.." + std::to_string(items->size()));
  }
  return (*items)[static_cast<std::size_t>(i - 1)];
}

Value field(const Value& tuple, std::string_view name) {
  if (!tuple.is_tuple()) {
    throw PatchError(ErrorKind::NoSuchField, "field access on a non-tuple value");
  }
  std::string key = normalize_identifier(name);
  const auto& t = tuple.as_tuple();
  for (std::size_t i = 0; i < t.names.size(); ++i) {
    if (t.names[i] == key) return t.items[i];
  }
  throw PatchError(ErrorKind::NoSuchField, "tuple has no field '" + key + "'");
}

// ---------------------------------------------------------------------------
// Operators

bool is_comparison(Op op) {
  return op == Op::Lt || op == Op::Gt || op == Op::Eq || op == Op::Le || op == Op::Ge;
}

bool is_unary(Op op) { return op == Op::Not || op == Op::Neg || op == Op::Size; }

namespace {

std::string op_name(Op op) {
  switch (op) {
    case Op::Add: return "+";
    case Op::Sub: return "-";
    case Op::Mul: return "*";
    case Op::Div: return "/";
    case Op::Pow: return "^";
    case Op::Lt: return "<";
    case Op::Gt: return ">";
    case Op::Eq: return "=";
    case Op::Le: return "<=";
    case Op::Ge: return ">=";
    case Op::And: return "AND";
    case Op::Or: return "OR";
    case Op::Not: return "NOT";
    case Op::In: return "in";
    case Op::Diff: return "diff";
    case Op::Union: return "union";
    case Op::Inter: return "intersect";
    case Op::Cross: return "cross";
    case Op::Neg: return "-";
    case Op::Size: return "#";
  }
  return "?";
}

bool orderable(const PatchType& a, const PatchType& b) {
  using K = PatchType::Kind;
  if (a.is_numeric() && b.is_numeric()) return true;
  return a.kind() == b.kind() && (a.kind() == K::String || a.kind() == K::Boolean);
}

std::optional<PatchType> fail(std::string* why, std::string msg) {
  if (why) *why = std::move(msg);
  return std::nullopt;
}

double checked_real(double r) {
  if (std::isnan(r)) throw PatchError(ErrorKind::DomainError, "result is not a number");
  if (std::isinf(r)) throw PatchError(ErrorKind::ArithOverflow, "real result overflows");
  return r;
}

Value set_of(std::vector<Value> items) { return Value::set(std::move(items)); }

bool set_contains(const SetValue& s, const Value& v) {
  return std::binary_search(s.items.begin(), s.items.end(), v,
                            [](const Value& a, const Value& b) { return compare_values(a, b) < 0; });
}

}  // namespace

std::optional<PatchType> binary_result_type(Op op, const PatchType& a, const PatchType& b,
                                            std::string* why) {
  using K = PatchType::Kind;
  const std::string name = op_name(op);
  switch (op) {
    case Op::Add:
    case Op::Sub:
    case Op::Mul:
      if (!a.is_numeric() || !b.is_numeric()) return fail(why, "'" + name + "' needs numbers");
      if (a.kind() == K::Integer && b.kind() == K::Integer) return PatchType::integer();
      return PatchType::real();
    case Op::Div:
    case Op::Pow:
      if (!a.is_numeric() || !b.is_numeric()) return fail(why, "'" + name + "' needs numbers");
      return PatchType::real();
    case Op::Lt:
    case Op::Gt:
    case Op::Le:
    case Op::Ge:
      if (!orderable(a, b)) return fail(why, "'" + name + "' needs two compatible scalars");
      return PatchType::boolean();
    case Op::Eq:
      if (!compatible(a, b)) return fail(why, "'=' needs compatible operands");
      return PatchType::boolean();
    case Op::And:
    case Op::Or:
      if (a.kind() != K::Boolean || b.kind() != K::Boolean) {
        return fail(why, "'" + name + "' needs booleans");
      }
      return PatchType::boolean();
    case Op::In:
      if (b.kind() != K::Set) return fail(why, "membership needs a set on the right");
      if (!compatible(a, b.element())) return fail(why, "element type does not match the set");
      return PatchType::boolean();
    case Op::Diff:
    case Op::Union:
    case Op::Inter: {
      if (a.kind() != K::Set || b.kind() != K::Set) return fail(why, "'" + name + "' needs sets");
      auto u = unify(a, b);
      if (!u) return fail(why, "'" + name + "' needs sets of one element type");
      return u;
    }
    case Op::Cross:
      if (a.kind() != K::Set || b.kind() != K::Set) return fail(why, "'cross' needs sets");
      return PatchType::set(PatchType::tuple({"first", "second"}, {a.element(), b.element()}));
    default:
      return fail(why, "'" + name + "' is not a binary operator");
  }
}

std::optional<PatchType> unary_result_type(Op op, const PatchType& a, std::string* why) {
  using K = PatchType::Kind;
  switch (op) {
    case Op::Not:
      if (a.kind() != K::Boolean) return fail(why, "NOT needs a boolean");
      return PatchType::boolean();
    case Op::Neg:
      if (!a.is_numeric()) return fail(why, "negation needs a number");
      return a;
    case Op::Size:
      if (!a.is_collection()) return fail(why, "'#' needs a list or set");
      return PatchType::integer();
    default:
      return fail(why, "not a unary operator");
  }
}

Value apply_binary(Op op, const Value& a, const Value& b) {
  switch (op) {
    case Op::Add:
    case Op::Sub:
    case Op::Mul: {
      if (!a.is_numeric() || !b.is_numeric()) {
        throw PatchError(ErrorKind::TypeMismatch, "'" + op_name(op) + "' needs numbers");
      }
      if (a.is_int() && b.is_int()) {
        std::int64_t r = 0;
        bool overflow = false;
        if (op == Op::Add) overflow = __builtin_add_overflow(a.as_int(), b.as_int(), &r);
        if (op == Op::Sub) overflow = __builtin_sub_overflow(a.as_int(), b.as_int(), &r);
        if (op == Op::Mul) overflow = __builtin_mul_overflow(a.as_int(), b.as_int(), &r);
        if (overflow) throw PatchError(ErrorKind::ArithOverflow, "integer overflow");
        return Value::integer(r);
      }
      const double x = a.as_number();
      const double y = b.as_number();
      if (op == Op::Add) return Value::real(checked_real(x + y));
      if (op == Op::Sub) return Value::real(checked_real(x - y));
      return Value::real(checked_real(x * y));
    }
    case Op::Div: {
      if (!a.is_numeric() || !b.is_numeric()) {
        throw PatchError(ErrorKind::TypeMismatch, "'/' needs numbers");
      }
      const double y = b.as_number();
      if (y == 0.0) throw PatchError(ErrorKind::DivisionByZero, "division by zero");
      return Value::real(checked_real(a.as_number() / y));
    }
    case Op::Pow: {
      if (!a.is_numeric() || !b.is_numeric()) {
        throw PatchError(ErrorKind::TypeMismatch, "'^' needs numbers");
      }
      const double x = a.as_number();
      const double y = b.as_number();
      if (x == 0.0 && y < 0.0) {
        throw PatchError(ErrorKind::DomainError, "zero raised to a negative power");
      }
      return Value::real(checked_real(std::pow(x, y)));
    }
    case Op::Lt:
    case Op::Gt:
    case Op::Le:
    case Op::Ge: {
      if (!orderable(type_of(a), type_of(b))) {
        throw PatchError(ErrorKind::TypeMismatch,
                         "'" + op_name(op) + "' needs two compatible scalars");
      }
      auto c = compare_values(a, b);
      if (op == Op::Lt) return Value::boolean(c < 0);
      if (op == Op::Gt) return Value::boolean(c > 0);
      if (op == Op::Le) return Value::boolean(c <= 0);
      return Value::boolean(c >= 0);
    }
    case Op::Eq: {
      const bool scalars_ok = (a.is_numeric() && b.is_numeric()) ||
                              (a.storage().index() == b.storage().index() &&
                               (a.is_bool() || a.is_string()));
      if (!scalars_ok && !compatible(type_of(a), type_of(b))) {
        throw PatchError(ErrorKind::TypeMismatch, "'=' needs compatible operands");
      }
      return Value::boolean(values_equal(a, b));
    }
    case Op::And:
    case Op::Or:
      if (!a.is_bool() || !b.is_bool()) {
        throw PatchError(ErrorKind::TypeMismatch, "'" + op_name(op) + "' needs booleans");
      }
      return Value::boolean(op == Op::And ? (a.as_bool() && b.as_bool())
                                          : (a.as_bool() || b.as_bool()));
    case Op::In: {
      std::string why;
      if (!binary_result_type(op, type_of(a), type_of(b), &why)) {
        throw PatchError(ErrorKind::TypeMismatch, why);
      }
      return Value::boolean(set_contains(b.as_set(), a));
    }
    case Op::Diff:
    case Op::Union:
    case Op::Inter: {
      std::string why;
      if (!binary_result_type(op, type_of(a), type_of(b), &why)) {
        throw PatchError(ErrorKind::TypeMismatch, why);
      }
      const auto& x = a.as_set().items;
      const auto& y = b.as_set().items;
      std::vector<Value> out;
      if (op == Op::Union) {
        out = x;
        out.insert(out.end(), y.begin(), y.end());
      } else {
        for (const auto& item : x) {
          const bool in_b = set_contains(b.as_set(), item);
          if ((op == Op::Inter) == in_b) out.push_back(item);
        }
      }
      return set_of(std::move(out));
    }
    case Op::Cross: {
      if (!a.is_set() || !b.is_set()) {
        throw PatchError(ErrorKind::TypeMismatch, "'cross' needs sets");
      }
      std::vector<Value> out;
      for (const auto& x : a.as_set().items) {
        for (const auto& y : b.as_set().items) {
          out.push_back(Value::tuple({"first", "second"}, {x, y}));
        }
      }
      return set_of(std::move(out));
    }
    default:
      throw PatchError(ErrorKind::TypeMismatch, "'" + op_name(op) + "' is not a binary operator");
  }
}

Value apply_unary(Op op, const Value& a) {
  switch (op) {
    case Op::Not:
      if (!a.is_bool()) throw PatchError(ErrorKind::TypeMismatch, "NOT needs a boolean");
      return Value::boolean(!a.as_bool());
    case Op::Neg:
      if (a.is_int()) {
        if (a.as_int() == std::numeric_limits<std::int64_t>::min()) {
          throw PatchError(ErrorKind::ArithOverflow, "integer overflow");
        }
        return Value::integer(-a.as_int());
      }
      if (a.is_real()) return Value::real(-a.as_real());
      throw PatchError(ErrorKind::TypeMismatch, "negation needs a number");
    case Op::Size:
      if (a.is_list()) return Value::integer(static_cast<std::int64_t>(a.as_list().items.size()));
      if (a.is_set()) return Value::integer(static_cast<std::int64_t>(a.as_set().items.size()));
      throw PatchError(ErrorKind::TypeMismatch, "'#' needs a list or set");
    default:
      throw PatchError(ErrorKind::TypeMismatch, "not a unary operator");
  }
}

}  // namespace patch
