#pragma once

#include <cstddef>
#include <string>
#include <string_view>

#include "patch/value.hpp"

namespace patch {

// Canonical literal syntax for values:
//   integers   42, -7              reals    2.09, 48.0, 1e+300
//   booleans   TRUE, FALSE         strings  "Main Road" (JSON-style escapes)
//   lists      [20, 9, 34]         sets     {"C", "Java", "Patch"}  (sorted)
//   tuples     <no: 2, street: "Main Road", city: "New York", zip: 10026>
std::string render_value(const Value& v);

// Reads text as a value of type t. Integer syntax is accepted for reals, and
// tuple members may be given positionally. Throws LiteralSyntaxError.
Value read_value(std::string_view text, const PatchType& t);

// Reads text without a target type; the type is inferred from the syntax
// (tuples must then name their members).
Value parse_literal(std::string_view text);

// Parses one literal starting at text[pos] and advances pos past it. Used by
// the expression parser. Leading whitespace is skipped.
Value parse_literal_at(std::string_view text, std::size_t& pos);

// True when text[pos..] starts a literal (number, string, TRUE/FALSE,
// bracketed collection).
bool starts_literal(std::string_view text, std::size_t pos);

std::string render_real(double v);
std::string render_string(std::string_view s);

// Type syntax: integer, real, boolean, string, list(T), set(T),
// tuple(name: T, ...).
std::string render_type(const PatchType& t);
PatchType parse_type(std::string_view text);

}  // namespace patch
