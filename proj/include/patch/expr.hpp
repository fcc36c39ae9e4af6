#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "patch/value.hpp"

namespace patch {

// Expression tree. `name` holds the variable name (Var) or field name
// (Field), always normalized; `args` holds operands in order.
struct Expr {
  enum class Kind { Literal, Var, Index, Field, Unary, Binary };

  Kind kind = Kind::Literal;
  Value literal;
  std::string name;
  Op op = Op::Add;
  std::vector<Expr> args;

  static Expr lit(Value v);
  static Expr var(std::string_view name);
  static Expr index(Expr collection, Expr position);
  static Expr field(Expr tuple, std::string_view name);
  static Expr unary(Op op, Expr operand);
  static Expr binary(Op op, Expr lhs, Expr rhs);

  // Var, or an Index/Field chain rooted at a Var.
  bool is_lvalue() const;
  // Root variable of an lvalue chain.
  const std::string& root_var() const;

  friend bool operator==(const Expr& a, const Expr& b);
};

// Canonical symbol for an operator: + - * / ^ < > = ≤ ≥ AND OR NOT ∈ ∖ ∪ ∩ × #
std::string_view op_symbol(Op op);

// Infix expression syntax. ASCII aliases are accepted for the set and
// comparison symbols (<=, >=, in, \, union, intersect, cross, −). A minus sign
// directly in front of a number is part of the number literal.
// Throws PatchError(ParseError) with the column of the offending token.
Expr parse_expr(std::string_view text);

// Canonical text: minimal parentheses, canonical symbols, normalized names.
// parse_expr(print_expr(e)) == e.
std::string print_expr(const Expr& e);

// Variables the expression reads.
void collect_vars(const Expr& e, std::vector<std::string>& out);

}  // namespace patch
