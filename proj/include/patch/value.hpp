#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace patch {

// Structural type of a Patch value. List and set carry exactly one element
// type; tuples carry named, ordered fields. Unknown only ever appears as the
// element type of an empty collection literal and unifies with anything.
class PatchType {
 public:
  enum class Kind { Unknown, Integer, Real, Boolean, String, List, Set, Tuple };

  PatchType() = default;

  static PatchType unknown() { return PatchType(Kind::Unknown); }
  static PatchType integer() { return PatchType(Kind::Integer); }
  static PatchType real() { return PatchType(Kind::Real); }
  static PatchType boolean() { return PatchType(Kind::Boolean); }
  static PatchType string() { return PatchType(Kind::String); }
  static PatchType list(PatchType element);
  static PatchType set(PatchType element);
  // Field names are normalized; duplicates throw TypeMismatch.
  static PatchType tuple(std::vector<std::string> names, std::vector<PatchType> types);

  Kind kind() const { return kind_; }
  bool is_numeric() const { return kind_ == Kind::Integer || kind_ == Kind::Real; }
  bool is_scalar() const;
  bool is_collection() const { return kind_ == Kind::List || kind_ == Kind::Set; }
  bool has_unknown() const;

  const PatchType& element() const;
  const std::vector<std::string>& field_names() const { return names_; }
  const std::vector<PatchType>& field_types() const { return children_; }
  std::optional<std::size_t> field_index(std::string_view normalized) const;

  friend bool operator==(const PatchType& a, const PatchType& b);

 private:
  explicit PatchType(Kind kind) : kind_(kind) {}

  Kind kind_ = Kind::Unknown;
  std::vector<PatchType> children_;
  std::vector<std::string> names_;
};

// Integer and real are mutually compatible at the scalar level; every other
// pair must be structurally equal (unknown element types match anything).
bool compatible(const PatchType& a, const PatchType& b);

// Most specific type both sides describe, filling unknown placeholders.
// Integer/real stay distinct: unify(integer, real) is nullopt.
std::optional<PatchType> unify(const PatchType& a, const PatchType& b);

// Replaces any remaining unknown placeholder with integer.
PatchType resolve_unknown(const PatchType& t);

class Value;

struct ListValue {
  std::vector<Value> items;
};

// Items are kept sorted by compare_values and free of duplicates.
struct SetValue {
  std::vector<Value> items;
};

struct TupleValue {
  std::vector<std::string> names;
  std::vector<Value> items;
};

class Value {
 public:
  using Storage =
      std::variant<std::int64_t, double, bool, std::string, ListValue, SetValue, TupleValue>;

  Value() : storage_(std::int64_t{0}) {}

  static Value integer(std::int64_t v) { return Value(Storage(v)); }
  static Value real(double v) { return Value(Storage(v)); }
  static Value boolean(bool v) { return Value(Storage(v)); }
  static Value string(std::string v) { return Value(Storage(std::move(v))); }
  // The collection factories enforce homogeneity. A mix of integer and real
  // scalars is widened to real; any other mix throws TypeMismatch.
  static Value list(std::vector<Value> items);
  static Value set(std::vector<Value> items);
  static Value tuple(std::vector<std::string> names, std::vector<Value> items);

  bool is_int() const { return std::holds_alternative<std::int64_t>(storage_); }
  bool is_real() const { return std::holds_alternative<double>(storage_); }
  bool is_bool() const { return std::holds_alternative<bool>(storage_); }
  bool is_string() const { return std::holds_alternative<std::string>(storage_); }
  bool is_list() const { return std::holds_alternative<ListValue>(storage_); }
  bool is_set() const { return std::holds_alternative<SetValue>(storage_); }
  bool is_tuple() const { return std::holds_alternative<TupleValue>(storage_); }
  bool is_numeric() const { return is_int() || is_real(); }

  std::int64_t as_int() const { return std::get<std::int64_t>(storage_); }
  double as_real() const { return std::get<double>(storage_); }
  // Integer or real, widened.
  double as_number() const;
  bool as_bool() const { return std::get<bool>(storage_); }
  const std::string& as_string() const { return std::get<std::string>(storage_); }
  const ListValue& as_list() const { return std::get<ListValue>(storage_); }
  ListValue& as_list() { return std::get<ListValue>(storage_); }
  const SetValue& as_set() const { return std::get<SetValue>(storage_); }
  const TupleValue& as_tuple() const { return std::get<TupleValue>(storage_); }
  TupleValue& as_tuple() { return std::get<TupleValue>(storage_); }

  const Storage& storage() const { return storage_; }

  // Exact structural identity (1 and 1.0 differ). Patch's own "=" is
  // values_equal below.
  friend bool operator==(const Value& a, const Value& b);

 private:
  explicit Value(Storage s) : storage_(std::move(s)) {}
  Storage storage_;
};

// Total order used for canonical set ordering. Integers and reals compare
// numerically after widening; values of unrelated kinds order by kind.
std::strong_ordering compare_values(const Value& a, const Value& b);

// Patch equality: numeric widening, structural on collections.
bool values_equal(const Value& a, const Value& b);

PatchType type_of(const Value& v);

// Converts v for storage into a slot of type target: identity when types
// match, integer -> real widens, real -> integer truncates toward zero.
Value assign_coerce(const Value& v, const PatchType& target);

// Initial value of a variable of type t: 0, 0.0, FALSE, "", empty
// collections, tuples of defaults.
Value default_value(const PatchType& t);

// 1-based positional access into lists and tuples.
Value index(const Value& collection, const Value& position);
Value field(const Value& tuple, std::string_view name);

enum class Op {
  Add, Sub, Mul, Div, Pow,
  Lt, Gt, Eq, Le, Ge,
  And, Or, Not,
  In, Diff, Union, Inter, Cross,
  Neg, Size,
};

bool is_comparison(Op op);
bool is_unary(Op op);

Value apply_binary(Op op, const Value& a, const Value& b);
Value apply_unary(Op op, const Value& a);

// Result type of an operator over operand types, or nullopt with a reason
// written to *why when the operands are not valid for it.
std::optional<PatchType> binary_result_type(Op op, const PatchType& a, const PatchType& b,
                                            std::string* why = nullptr);
std::optional<PatchType> unary_result_type(Op op, const PatchType& a, std::string* why = nullptr);

}  // namespace patch
